#include "wfshape/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wfshape/regulator.hpp"
#include "wfshape/rng.hpp"

namespace wfshape {

void FrontParams::validate() const {
    if (server_max < 1 || client_max < 1)
        throw std::invalid_argument("FRONT padding maxima must be >= 1");
    if (!(window_min > 0) || !(window_min <= window_max) || !std::isfinite(window_max))
        throw std::invalid_argument("FRONT windows must satisfy 0 < W_min <= W_max");
}

void TamarawParams::validate() const {
    if (!(upload_interval > 0) || !(download_interval > 0) || !std::isfinite(upload_interval) ||
        !std::isfinite(download_interval))
        throw std::invalid_argument("Tamaraw slot intervals must be > 0");
    if (pad_multiple < 1) throw std::invalid_argument("Tamaraw pad multiple must be >= 1");
}

FrontParams front_1700() { return {1700, 1700, 1.0, 14.0}; }
FrontParams front_2500() { return {2500, 2500, 1.0, 14.0}; }
TamarawParams tamaraw_default() { return {0.04, 0.012, 100}; }

namespace {

void add_front_dummies(Rng& rng, std::uint64_t max_count, const FrontParams& params,
                       Direction direction, std::vector<DefendedPacket>& out) {
    const auto count = rng.uniform_int(1, max_count);
    const double window = rng.uniform(params.window_min, params.window_max);
    for (std::uint64_t i = 0; i < count; ++i)
        out.push_back({rng.rayleigh(window), direction, PacketKind::Dummy, std::nullopt});
}

void tamaraw_direction(const std::vector<double>& arrivals, double interval,
                       std::uint64_t multiple, Direction direction,
                       std::vector<DefendedPacket>& out) {
    std::size_t sent = 0;
    std::uint64_t slots = 0;
    // Slot times are k * interval rather than a running sum, so gaps do not drift.
    while (sent < arrivals.size() || slots == 0 || slots % multiple != 0) {
        const double t = static_cast<double>(slots) * interval;
        if (sent < arrivals.size() && arrivals[sent] <= t) {
            out.push_back({t, direction, PacketKind::Real, arrivals[sent]});
            ++sent;
        } else {
            out.push_back({t, direction, PacketKind::Dummy, std::nullopt});
        }
        ++slots;
    }
}

}  // namespace

DefendedTrace apply_front(const Trace& trace, const FrontParams& params, std::uint64_t seed) {
    params.validate();
    DefendedTrace out;
    out.seed = seed;
    for (const auto& p : trace.packets)
        out.packets.push_back({p.time, p.direction, PacketKind::Real, p.time});

    Rng rng(seed);
    add_front_dummies(rng, params.client_max, params, Direction::Upload, out.packets);
    add_front_dummies(rng, params.server_max, params, Direction::Download, out.packets);
    sort_schedule(out.packets);
    return out;
}

DefendedTrace apply_tamaraw(const Trace& trace, const TamarawParams& params) {
    params.validate();
    DefendedTrace out;
    tamaraw_direction(trace.times(Direction::Upload), params.upload_interval,
                      params.pad_multiple, Direction::Upload, out.packets);
    tamaraw_direction(trace.times(Direction::Download), params.download_interval,
                      params.pad_multiple, Direction::Download, out.packets);
    sort_schedule(out.packets);
    return out;
}

}  // namespace wfshape
