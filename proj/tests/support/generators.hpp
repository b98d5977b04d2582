#pragma once

// Seeded random inputs for the property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "wfshape/regulator.hpp"
#include "wfshape/rng.hpp"
#include "wfshape/trace.hpp"

namespace wfshape::testing {

/// Bursty trace of up to max_packets packets. Times are on a millisecond grid
/// so ties with slot times and with each other actually happen.
inline Trace random_trace(Rng& rng, std::size_t max_packets) {
    Trace t;
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, max_packets));
    const double upload_share = rng.uniform(0.05, 0.6);
    double clock = 0.0;
    while (t.packets.size() < n) {
        // a burst followed by a quiet gap
        const auto burst = rng.uniform_int(1, 120);
        const double burst_rate = rng.uniform(20.0, 800.0);
        for (std::uint64_t i = 0; i < burst && t.packets.size() < n; ++i) {
            // about one packet in five shares the previous timestamp
            if (rng.uniform01() >= 0.2) clock += rng.uniform(0.0, 2.0 / burst_rate);
            const double ms = std::round(clock * 1000.0) / 1000.0;
            t.packets.push_back(
                {ms, rng.uniform01() < upload_share ? Direction::Upload : Direction::Download});
        }
        clock += rng.uniform(0.0, 6.0);
    }
    normalize(t);
    return t;
}

/// Parameters spread well beyond the published presets, including the edges
/// (D = 1, N = 0, tiny delay caps, fractional upload ratios).
inline RegulatorParams random_params(Rng& rng) {
    RegulatorParams p;
    p.initial_rate = rng.uniform01() < 0.1 ? 1.0 : rng.uniform(1.0, 400.0);
    p.decay = rng.uniform01() < 0.1 ? 1.0 : rng.uniform(0.5, 1.0);
    p.surge_threshold = rng.uniform(0.2, 10.0);
    p.max_budget = rng.uniform01() < 0.1 ? 0 : rng.uniform_int(0, 1500);
    p.upload_ratio = rng.uniform(0.5, 8.0);
    p.delay_cap = rng.uniform(0.05, 3.0);
    p.initial_upload_rate = rng.uniform(0.5, 10.0);
    p.tail_grace = rng.uniform01() < 0.5 ? 0.0 : rng.uniform(0.0, 2.0);
    return p;
}

}  // namespace wfshape::testing
