#include "wfshape/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace wfshape {

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

TraceStats trace_stats(const Trace& trace) {
    if (trace.empty()) throw DataError("statistics of an empty trace");
    TraceStats s;
    s.packet_count = trace.size();
    s.duration = trace.duration();

    std::vector<double> times;
    times.reserve(trace.size());
    for (const auto& p : trace.packets) times.push_back(p.time);
    // Traces are kept sorted by time.
    s.time_iqr = quantile_sorted(times, 0.75) - quantile_sorted(times, 0.25);

    s.per_second_bins.resize(static_cast<std::size_t>(std::floor(s.duration)) + 1);
    for (const auto& p : trace.packets) {
        auto& bin = s.per_second_bins[static_cast<std::size_t>(std::floor(p.time))];
        if (p.direction == Direction::Upload) {
            ++bin.upload;
            ++s.upload_count;
        } else {
            ++bin.download;
            ++s.download_count;
        }
    }
    s.download_upload_ratio = s.upload_count == 0
                                  ? std::numeric_limits<double>::infinity()
                                  : static_cast<double>(s.download_count) /
                                        static_cast<double>(s.upload_count);
    return s;
}

DatasetStats dataset_stats(const Dataset& dataset) {
    if (dataset.empty()) throw DataError("statistics of an empty dataset");
    DatasetStats out;
    out.trace_count = dataset.size();
    std::vector<double> iqrs;
    std::size_t uploads = 0;
    std::size_t downloads = 0;
    for (const auto& t : dataset.traces) {
        auto s = trace_stats(t);
        iqrs.push_back(s.time_iqr);
        out.mean_packet_count += static_cast<double>(s.packet_count);
        out.mean_duration += s.duration;
        uploads += s.upload_count;
        downloads += s.download_count;
        out.per_trace.push_back(std::move(s));
    }
    const auto n = static_cast<double>(dataset.size());
    out.mean_packet_count /= n;
    out.mean_duration /= n;
    out.median_iqr = quantile(std::move(iqrs), 0.5);
    out.download_upload_ratio = uploads == 0 ? std::numeric_limits<double>::infinity()
                                             : static_cast<double>(downloads) /
                                                   static_cast<double>(uploads);
    return out;
}

OffsetProfile post_tenth_packet_profile(const Dataset& dataset, double bin_width) {
    if (!(bin_width > 0)) throw std::invalid_argument("bin width must be > 0");
    OffsetProfile out;
    out.bin_width = bin_width;
    std::vector<double> offsets;
    for (const auto& t : dataset.traces) {
        if (t.size() < 10) {
            ++out.skipped_traces;
            continue;
        }
        const double tenth = t.packets[9].time;
        for (std::size_t i = 10; i < t.size(); ++i) offsets.push_back(t.packets[i].time - tenth);
    }
    out.pooled_packets = offsets.size();
    if (offsets.empty()) return out;

    std::sort(offsets.begin(), offsets.end());
    out.median_offset = quantile_sorted(offsets, 0.5);
    out.histogram.resize(static_cast<std::size_t>(std::floor(offsets.back() / bin_width)) + 1);
    for (double o : offsets) ++out.histogram[static_cast<std::size_t>(std::floor(o / bin_width))];
    return out;
}

RegulatorParams volume_adjustment(double reference_mean_count, double target_mean_count,
                                  const RegulatorParams& params) {
    if (!(reference_mean_count > 0) || !(target_mean_count > 0))
        throw std::invalid_argument("mean packet counts must be > 0");
    const double ratio = target_mean_count / reference_mean_count;
    RegulatorParams out = params;
    out.initial_rate = params.initial_rate * ratio;
    out.max_budget =
        static_cast<std::uint64_t>(std::llround(static_cast<double>(params.max_budget) * ratio));
    return out;
}

void write_trace_stats_csv(std::ostream& out, const Dataset& dataset, const DatasetStats& stats) {
    out << "trace,label,packets,uploads,downloads,duration,time_iqr,download_upload_ratio\n";
    for (std::size_t i = 0; i < stats.per_trace.size(); ++i) {
        const auto& s = stats.per_trace[i];
        const auto& t = dataset.traces[i];
        out << (t.name.empty() ? std::to_string(i) : t.name) << ',' << t.label << ','
            << s.packet_count << ',' << s.upload_count << ',' << s.download_count << ','
            << s.duration << ',' << s.time_iqr << ',' << s.download_upload_ratio << '\n';
    }
}

void write_second_bins_csv(std::ostream& out, const Dataset& dataset, const DatasetStats& stats) {
    out << "trace,second,upload,download\n";
    for (std::size_t i = 0; i < stats.per_trace.size(); ++i) {
        const auto& t = dataset.traces[i];
        const auto& bins = stats.per_trace[i].per_second_bins;
        for (std::size_t b = 0; b < bins.size(); ++b) {
            out << (t.name.empty() ? std::to_string(i) : t.name) << ',' << b << ','
                << bins[b].upload << ',' << bins[b].download << '\n';
        }
    }
}

void write_offset_profile_csv(std::ostream& out, const OffsetProfile& profile) {
    out << "offset_start,offset_end,packets\n";
    for (std::size_t k = 0; k < profile.histogram.size(); ++k) {
        out << static_cast<double>(k) * profile.bin_width << ','
            << static_cast<double>(k + 1) * profile.bin_width << ',' << profile.histogram[k]
            << '\n';
    }
}

}  // namespace wfshape
