#include "wfshape/metrics.hpp"

#include <algorithm>
#include <ostream>

namespace wfshape {

namespace {

void require_nonempty(const Trace& original) {
    if (original.empty()) throw DataError("overhead is undefined for an empty original trace");
}

void require_duration(const Trace& original) {
    require_nonempty(original);
    if (!(original.duration() > 0))
        throw DataError("latency overhead is undefined for a zero-duration original trace");
}

}  // namespace

double bandwidth_overhead(const Trace& original, const DefendedTrace& defended) {
    require_nonempty(original);
    return static_cast<double>(defended.count(PacketKind::Dummy)) /
           static_cast<double>(original.size());
}

double latency_overhead(const Trace& original, const DefendedTrace& defended) {
    require_duration(original);
    double last_real = 0.0;
    for (const auto& p : defended.packets)
        if (p.is_real()) last_real = std::max(last_real, p.send_time);
    const double t_last = original.duration();
    return std::max(0.0, last_real - t_last) / t_last;
}

namespace {

struct DelayTerms {
    double last_download = 0.0;
    double max_upload = 0.0;
};

DelayTerms delay_terms(const DefendedTrace& defended) {
    DelayTerms terms;
    double last_download_send = -1.0;
    for (const auto& p : defended.packets) {
        if (!p.is_real()) continue;
        if (!p.source_time)
            throw DataError("real packet without a source time; call attach_sources first");
        if (p.direction == Direction::Download) {
            if (p.send_time >= last_download_send) {
                last_download_send = p.send_time;
                terms.last_download = p.delay();
            }
        } else {
            terms.max_upload = std::max(terms.max_upload, p.delay());
        }
    }
    return terms;
}

}  // namespace

double estimated_latency_overhead(const Trace& original, const DefendedTrace& defended) {
    require_duration(original);
    const auto terms = delay_terms(defended);
    return (terms.last_download + terms.max_upload) / original.duration();
}

OverheadReport overhead_report(const Trace& original, const DefendedTrace& defended) {
    OverheadReport r;
    r.bandwidth_overhead = bandwidth_overhead(original, defended);
    r.latency_overhead = latency_overhead(original, defended);
    r.estimated_latency_overhead = estimated_latency_overhead(original, defended);
    r.dummy_count = defended.count(PacketKind::Dummy);
    r.real_count = original.size();
    const auto terms = delay_terms(defended);
    r.max_upload_delay = terms.max_upload;
    r.last_real_download_delay = terms.last_download;
    return r;
}

DatasetOverhead dataset_overhead(const Dataset& dataset,
                                 const std::vector<DefendedTrace>& defended) {
    if (dataset.size() != defended.size())
        throw DataError("dataset has " + std::to_string(dataset.size()) + " traces but " +
                        std::to_string(defended.size()) + " defended traces were given");
    if (dataset.empty()) throw DataError("empty dataset");

    DatasetOverhead out;
    std::size_t total_dummy = 0;
    std::size_t total_real = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        OverheadReport r;
        try {
            r = overhead_report(dataset.traces[i], defended[i]);
        } catch (const DataError& e) {
            const auto& name = dataset.traces[i].name;
            throw DataError((name.empty() ? "trace " + std::to_string(i) : name) + ": " + e.what());
        }
        out.mean_bandwidth += r.bandwidth_overhead;
        out.mean_latency += r.latency_overhead;
        out.mean_estimated_latency += r.estimated_latency_overhead;
        total_dummy += r.dummy_count;
        total_real += r.real_count;
        out.per_trace.push_back(r);
    }
    const auto n = static_cast<double>(dataset.size());
    out.mean_bandwidth /= n;
    out.mean_latency /= n;
    out.mean_estimated_latency /= n;
    out.aggregate_bandwidth = static_cast<double>(total_dummy) / static_cast<double>(total_real);
    return out;
}

void write_report_kv(std::ostream& out, const DatasetOverhead& o) {
    out << "traces=" << o.per_trace.size() << '\n'
        << "mean_bandwidth_overhead=" << o.mean_bandwidth << '\n'
        << "aggregate_bandwidth_overhead=" << o.aggregate_bandwidth << '\n'
        << "mean_latency_overhead=" << o.mean_latency << '\n'
        << "mean_estimated_latency_overhead=" << o.mean_estimated_latency << '\n';
}

void write_report_csv(std::ostream& out, const DatasetOverhead& o,
                      const std::vector<std::string>& names) {
    out << "trace,real,dummy,bandwidth_overhead,latency_overhead,estimated_latency_overhead,"
           "last_real_download_delay,max_upload_delay\n";
    for (std::size_t i = 0; i < o.per_trace.size(); ++i) {
        const auto& r = o.per_trace[i];
        out << (i < names.size() ? names[i] : std::to_string(i)) << ',' << r.real_count << ','
            << r.dummy_count << ',' << r.bandwidth_overhead << ',' << r.latency_overhead << ','
            << r.estimated_latency_overhead << ',' << r.last_real_download_delay << ','
            << r.max_upload_delay << '\n';
    }
}

}  // namespace wfshape
