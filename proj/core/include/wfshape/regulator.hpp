#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wfshape/trace.hpp"

namespace wfshape {

/// RegulaTor parameters. Download padding follows a decaying surge rate with a
/// randomized dummy budget; upload slots are derived from the download slots.
struct RegulatorParams {
    double initial_rate = 277.0;       // R, packets/s at the start of a surge
    double decay = 0.94;               // D, per-second multiplicative decay, (0, 1]
    double surge_threshold = 3.55;     // T, queue length / target rate that restarts a surge
    std::uint64_t max_budget = 3550;   // N, upper bound of the drawn dummy budget
    double upload_ratio = 3.95;        // U, download slots per upload slot
    double delay_cap = 1.77;           // C, max seconds a real upload may wait
    double initial_upload_rate = 4.0;  // upload packets/s before the first surge
    double tail_grace = 0.0;           // seconds the slot clock keeps running after the end

    /// Throws std::invalid_argument naming the first out-of-range field.
    void validate() const;

    friend bool operator==(const RegulatorParams&, const RegulatorParams&) = default;
};

RegulatorParams regulator_heavy();
RegulatorParams regulator_light();

std::string describe(const RegulatorParams& params);

/// Number of download packets passed through before the surge machinery starts.
inline constexpr std::size_t kSurgeActivationPackets = 10;

/// max(1, R * D^elapsed).
double target_rate(const RegulatorParams& params, double elapsed);

/// One iteration of the download padding loop.
struct SlotRecord {
    double time = 0.0;
    double rate = 0.0;         // target rate computed at this slot (before any reset)
    std::size_t waiting = 0;   // real packets queued when the slot fired
    bool surge_reset = false;  // the queue crossed the threshold here
};

struct DownloadSchedule {
    std::vector<DefendedPacket> packets;
    std::vector<SlotRecord> slots;  // every slot of the padding loop, sending or not
    double surge_start = std::numeric_limits<double>::infinity();
    double end_time = 0.0;  // time the slot clock stops (exclusive)
    std::uint64_t drawn_budget = 0;
    std::uint64_t surge_resets = 0;

    bool active() const { return surge_start != std::numeric_limits<double>::infinity(); }
};

std::uint64_t draw_budget(const RegulatorParams& params, std::uint64_t seed);

DownloadSchedule simulate_download(const Trace& trace, const RegulatorParams& params,
                                   std::uint64_t seed);

/// Upload side driven by an already simulated download schedule.
std::vector<DefendedPacket> simulate_upload(const Trace& trace, const RegulatorParams& params,
                                            const DownloadSchedule& download);

DefendedTrace apply_regulator(const Trace& trace, const RegulatorParams& params,
                              std::uint64_t seed);

/// Stable order by (send_time, direction); per-direction order is preserved.
void sort_schedule(std::vector<DefendedPacket>& packets);

}  // namespace wfshape
