#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wfshape/trace.hpp"

namespace wfshape {

/// Shape of one synthetic page. Every instance places the same surges; the
/// only per-instance randomness is the surge start jitter and size spread.
struct SynthProfile {
    std::string class_id;
    std::vector<std::size_t> surge_sizes;
    std::vector<double> surge_times;
    double upload_fraction = 1.0 / 7.0;
    std::vector<double> surge_upload_fractions;  // optional per-surge override
    double jitter = 0.0;        // surge start offset drawn from [-jitter, +jitter]
    double size_spread = 0.0;   // surge size scaled by a factor from [1-s, 1+s]
    double packet_rate = 400.0; // packets/s inside a surge

    void validate() const;
};

Dataset generate(const SynthProfile& profile, std::size_t instances, std::uint64_t seed);

/// Concatenation of generate() over several profiles; names are `<class>-<instance>`.
Dataset generate(const std::vector<SynthProfile>& profiles, std::size_t instances,
                 std::uint64_t seed);

/// A family of `classes` page profiles with similar volumes that differ in
/// surge layout and per-surge upload mix. Undefended they are easy to tell
/// apart; the differences live in timing and ordering, not in coarse volume.
std::vector<SynthProfile> separable_profiles(std::size_t classes);

}  // namespace wfshape
