#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "wfshape/trace.hpp"

namespace wfshape {

struct OverheadReport {
    double bandwidth_overhead = 0.0;
    double latency_overhead = 0.0;
    double estimated_latency_overhead = 0.0;
    std::size_t dummy_count = 0;
    std::size_t real_count = 0;
    double max_upload_delay = 0.0;
    double last_real_download_delay = 0.0;
};

struct DatasetOverhead {
    double mean_bandwidth = 0.0;
    double aggregate_bandwidth = 0.0;
    double mean_latency = 0.0;
    double mean_estimated_latency = 0.0;
    std::vector<OverheadReport> per_trace;
};

/// dummies / original packet count.
double bandwidth_overhead(const Trace& original, const DefendedTrace& defended);

/// Extra delay of the last real packet relative to the original duration, clamped at 0.
double latency_overhead(const Trace& original, const DefendedTrace& defended);

/// (delay of the last real download + largest real upload delay) / original duration.
/// Needs source times on the defended packets.
double estimated_latency_overhead(const Trace& original, const DefendedTrace& defended);

OverheadReport overhead_report(const Trace& original, const DefendedTrace& defended);

DatasetOverhead dataset_overhead(const Dataset& dataset, const std::vector<DefendedTrace>& defended);

void write_report_kv(std::ostream& out, const DatasetOverhead& overhead);

/// One row per trace, header first. `names` may be empty.
void write_report_csv(std::ostream& out, const DatasetOverhead& overhead,
                      const std::vector<std::string>& names);

}  // namespace wfshape
