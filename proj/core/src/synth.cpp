#include "wfshape/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wfshape/rng.hpp"

namespace wfshape {

void SynthProfile::validate() const {
    if (surge_sizes.size() != surge_times.size())
        throw std::invalid_argument("surge sizes and times must have equal length");
    if (!surge_upload_fractions.empty() && surge_upload_fractions.size() != surge_sizes.size())
        throw std::invalid_argument("per-surge upload fractions must match the surge count");
    auto valid_fraction = [](double f) { return f > 0 && f < 1; };
    if (!valid_fraction(upload_fraction))
        throw std::invalid_argument("upload fraction must be in (0, 1)");
    for (double f : surge_upload_fractions)
        if (!valid_fraction(f)) throw std::invalid_argument("upload fraction must be in (0, 1)");
    for (auto s : surge_sizes)
        if (s < 1) throw std::invalid_argument("surge sizes must be >= 1");
    if (!(jitter >= 0) || !(size_spread >= 0 && size_spread < 1) || !(packet_rate > 0))
        throw std::invalid_argument("invalid jitter, size spread or packet rate");
}

namespace {

Trace generate_instance(const SynthProfile& profile, std::uint64_t seed) {
    Rng rng(seed);
    Trace trace;
    trace.label = profile.class_id;
    for (std::size_t k = 0; k < profile.surge_sizes.size(); ++k) {
        const double offset = profile.jitter > 0 ? rng.uniform(-profile.jitter, profile.jitter) : 0.0;
        const double start = std::max(0.0, profile.surge_times[k] + offset);
        const double scale =
            profile.size_spread > 0 ? rng.uniform(1 - profile.size_spread, 1 + profile.size_spread)
                                    : 1.0;
        const auto size = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::llround(static_cast<double>(profile.surge_sizes[k]) * scale)));
        const double fraction = profile.surge_upload_fractions.empty()
                                    ? profile.upload_fraction
                                    : profile.surge_upload_fractions[k];
        // Uploads are spread evenly through the surge: packet i is an upload
        // when the running quota floor(i * fraction) steps up.
        for (std::size_t i = 0; i < size; ++i) {
            const auto before = std::floor(static_cast<double>(i) * fraction + 1e-9);
            const auto after = std::floor(static_cast<double>(i + 1) * fraction + 1e-9);
            trace.packets.push_back({start + static_cast<double>(i) / profile.packet_rate,
                                     after > before ? Direction::Upload : Direction::Download});
        }
    }
    normalize(trace);
    return trace;
}

}  // namespace

Dataset generate(const SynthProfile& profile, std::size_t instances, std::uint64_t seed) {
    profile.validate();
    if (instances < 1) throw std::invalid_argument("instances must be >= 1");
    Dataset out;
    out.name = "synth-" + profile.class_id;
    const auto class_seed = derive_seed(seed, profile.class_id);
    for (std::size_t i = 0; i < instances; ++i) {
        Trace t = generate_instance(profile, derive_seed(class_seed, static_cast<std::uint64_t>(i)));
        t.name = profile.class_id + "-" + std::to_string(i);
        out.traces.push_back(std::move(t));
    }
    return out;
}

Dataset generate(const std::vector<SynthProfile>& profiles, std::size_t instances,
                 std::uint64_t seed) {
    Dataset out;
    out.name = "synth";
    for (const auto& p : profiles) {
        auto part = generate(p, instances, seed);
        for (auto& t : part.traces) out.traces.push_back(std::move(t));
    }
    return out;
}

std::vector<SynthProfile> separable_profiles(std::size_t classes) {
    std::vector<SynthProfile> out;
    for (std::size_t c = 0; c < classes; ++c) {
        const double x = static_cast<double>(c);
        SynthProfile p;
        p.class_id = std::to_string(c);
        p.surge_sizes = {300 + 20 * c, 500 - 15 * c, 200 + 10 * c};
        p.surge_times = {0.0, 2.0 + 0.6 * x, 6.0 + 0.3 * x};
        p.surge_upload_fractions = {0.1 + 0.02 * x, 0.12, 0.3 - 0.015 * x};
        p.jitter = 0.3;
        p.size_spread = 0.1;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace wfshape
