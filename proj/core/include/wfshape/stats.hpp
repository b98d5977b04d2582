#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "wfshape/regulator.hpp"
#include "wfshape/trace.hpp"

namespace wfshape {

/// Linear interpolation between order statistics (h = (n-1)q). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double q);
double quantile(std::vector<double> values, double q);

struct SecondBin {
    std::size_t upload = 0;
    std::size_t download = 0;
};

struct TraceStats {
    std::size_t packet_count = 0;
    std::size_t upload_count = 0;
    std::size_t download_count = 0;
    double duration = 0.0;
    double time_iqr = 0.0;
    double download_upload_ratio = 0.0;  // +inf when there are no uploads
    std::vector<SecondBin> per_second_bins;
};

TraceStats trace_stats(const Trace& trace);

struct DatasetStats {
    std::size_t trace_count = 0;
    double median_iqr = 0.0;
    double mean_packet_count = 0.0;
    double mean_duration = 0.0;
    double download_upload_ratio = 0.0;  // aggregate: total downloads / total uploads
    std::vector<TraceStats> per_trace;
};

DatasetStats dataset_stats(const Dataset& dataset);

struct OffsetProfile {
    double bin_width = 1.0;
    std::vector<std::size_t> histogram;  // bin k covers [k*w, (k+1)*w)
    double median_offset = 0.0;
    std::size_t pooled_packets = 0;
    std::size_t skipped_traces = 0;
};

/// Pools (t - t_10th) over all packets after the 10th packet of every trace
/// that has at least 10 packets.
OffsetProfile post_tenth_packet_profile(const Dataset& dataset, double bin_width = 1.0);

/// Scales the initial surge rate and the padding budget by target/reference.
RegulatorParams volume_adjustment(double reference_mean_count, double target_mean_count,
                                  const RegulatorParams& params);

void write_trace_stats_csv(std::ostream& out, const Dataset& dataset, const DatasetStats& stats);
void write_second_bins_csv(std::ostream& out, const Dataset& dataset, const DatasetStats& stats);
void write_offset_profile_csv(std::ostream& out, const OffsetProfile& profile);

}  // namespace wfshape
