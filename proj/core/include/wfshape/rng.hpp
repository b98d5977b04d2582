#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace wfshape {

// Seeded randomness with draws that do not depend on the standard library's
// distribution implementations, so outputs are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer on [lo, hi], both inclusive.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Rayleigh-distributed sample with the given scale, by inverse CDF.
    double rayleigh(double scale);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform_int(0, i - 1));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace wfshape
