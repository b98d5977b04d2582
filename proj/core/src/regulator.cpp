#include "wfshape/regulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wfshape/rng.hpp"

namespace wfshape {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid regulator parameter: ") + what);
}

DefendedPacket real_packet(double send, Direction d, double source) {
    return {send, d, PacketKind::Real, source};
}

DefendedPacket dummy_packet(double send, Direction d) {
    return {send, d, PacketKind::Dummy, std::nullopt};
}

}  // namespace

void RegulatorParams::validate() const {
    require(std::isfinite(initial_rate) && initial_rate > 0, "initial surge rate must be > 0");
    require(decay > 0 && decay <= 1, "decay must be in (0, 1]");
    require(std::isfinite(surge_threshold) && surge_threshold > 0,
            "surge threshold must be > 0");
    require(std::isfinite(upload_ratio) && upload_ratio > 0, "upload ratio must be > 0");
    require(std::isfinite(delay_cap) && delay_cap > 0, "delay cap must be > 0");
    require(std::isfinite(initial_upload_rate) && initial_upload_rate > 0,
            "initial upload rate must be > 0");
    require(std::isfinite(tail_grace) && tail_grace >= 0, "tail grace must be >= 0");
}

RegulatorParams regulator_heavy() {
    return {277.0, 0.94, 3.55, 3550, 3.95, 1.77};
}

RegulatorParams regulator_light() {
    return {260.0, 0.86, 3.75, 2080, 4.02, 2.08};
}

std::string describe(const RegulatorParams& p) {
    std::ostringstream out;
    out.precision(10);
    out << "R=" << p.initial_rate << " D=" << p.decay << " T=" << p.surge_threshold
        << " N=" << p.max_budget << " U=" << p.upload_ratio << " C=" << p.delay_cap;
    return out.str();
}

double target_rate(const RegulatorParams& params, double elapsed) {
    const double rate = params.initial_rate * std::pow(params.decay, elapsed);
    return rate < 1.0 ? 1.0 : rate;
}

std::uint64_t draw_budget(const RegulatorParams& params, std::uint64_t seed) {
    Rng rng(seed);
    return rng.uniform_int(0, params.max_budget);
}

DownloadSchedule simulate_download(const Trace& trace, const RegulatorParams& params,
                                   std::uint64_t seed) {
    params.validate();
    DownloadSchedule out;
    out.drawn_budget = draw_budget(params, seed);

    const auto arrivals = trace.times(Direction::Download);
    const std::size_t n = arrivals.size();

    if (n < kSurgeActivationPackets) {
        for (double t : arrivals) out.packets.push_back(real_packet(t, Direction::Download, t));
        out.end_time = trace.duration() + params.tail_grace;
        return out;
    }

    for (std::size_t i = 0; i < kSurgeActivationPackets; ++i)
        out.packets.push_back(real_packet(arrivals[i], Direction::Download, arrivals[i]));

    out.surge_start = arrivals[kSurgeActivationPackets - 1];
    double surge_time = out.surge_start;
    double next_slot = out.surge_start;

    std::size_t arrived = kSurgeActivationPackets;  // arrivals[< arrived] have arrived
    std::size_t sent = kSurgeActivationPackets;     // arrivals[< sent] have been sent
    std::uint64_t dummies = 0;

    // The loop runs until every real packet is out and the budget is spent,
    // then for tail_grace more seconds.
    bool drained = sent == n && dummies == out.drawn_budget;
    double drained_at = out.surge_start;

    while (!(drained && next_slot >= drained_at + params.tail_grace)) {
        const double now = next_slot;
        while (arrived < n && arrivals[arrived] <= now) ++arrived;
        const std::size_t waiting = arrived - sent;

        const double rate = target_rate(params, now - surge_time);
        const bool reset = static_cast<double>(waiting) > params.surge_threshold * rate;
        if (reset) {
            surge_time = now;
            ++out.surge_resets;
        }

        out.slots.push_back({now, rate, waiting, reset});
        if (waiting == 0) {
            if (dummies < out.drawn_budget) {
                out.packets.push_back(dummy_packet(now, Direction::Download));
                ++dummies;
            }
        } else {
            out.packets.push_back(real_packet(now, Direction::Download, arrivals[sent]));
            ++sent;
        }

        if (!drained && sent == n && dummies == out.drawn_budget) {
            drained = true;
            drained_at = now;
        }
        // Gap uses the rate from before any reset in this slot.
        next_slot = now + 1.0 / rate;
    }
    out.end_time = drained_at + params.tail_grace;
    return out;
}

std::vector<DefendedPacket> simulate_upload(const Trace& trace, const RegulatorParams& params,
                                            const DownloadSchedule& download) {
    params.validate();
    const auto arrivals = trace.times(Direction::Upload);

    std::vector<double> slots;
    const double prelude_end = std::min(download.surge_start, download.end_time);
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) / params.initial_upload_rate;
        if (t >= prelude_end) break;
        slots.push_back(t);
    }
    const double credit_step = 1.0 / params.upload_ratio;
    double credit = 0.0;
    for (const auto& slot : download.slots) {
        credit += credit_step;
        if (credit >= 1.0) {
            slots.push_back(slot.time);
            credit -= 1.0;
        }
    }

    std::vector<DefendedPacket> out;
    out.reserve(slots.size() + arrivals.size());
    std::size_t sent = 0;
    auto flush_before = [&](double t) {
        while (sent < arrivals.size() && arrivals[sent] + params.delay_cap < t) {
            out.push_back(real_packet(arrivals[sent] + params.delay_cap, Direction::Upload,
                                      arrivals[sent]));
            ++sent;
        }
    };

    for (double slot : slots) {
        flush_before(slot);
        if (sent < arrivals.size() && arrivals[sent] <= slot) {
            out.push_back(real_packet(slot, Direction::Upload, arrivals[sent]));
            ++sent;
        } else {
            out.push_back(dummy_packet(slot, Direction::Upload));
        }
    }
    flush_before(std::numeric_limits<double>::infinity());
    return out;
}

void sort_schedule(std::vector<DefendedPacket>& packets) {
    std::stable_sort(packets.begin(), packets.end(),
                     [](const DefendedPacket& a, const DefendedPacket& b) {
                         if (a.send_time != b.send_time) return a.send_time < b.send_time;
                         return a.direction < b.direction;
                     });
}

DefendedTrace apply_regulator(const Trace& trace, const RegulatorParams& params,
                              std::uint64_t seed) {
    auto download = simulate_download(trace, params, seed);

    DefendedTrace out;
    out.seed = seed;
    out.drawn_budget = download.drawn_budget;
    if (trace.empty()) return out;

    auto upload = simulate_upload(trace, params, download);
    out.packets = std::move(download.packets);
    out.packets.insert(out.packets.end(), upload.begin(), upload.end());
    sort_schedule(out.packets);
    return out;
}

}  // namespace wfshape
