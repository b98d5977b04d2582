#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "support/generators.hpp"
#include "wfshape/stats.hpp"

using namespace wfshape;

namespace {

// Reference quantile: rank h = (n-1)q, interpolate between floor(h) and ceil(h).
double oracle_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Trace from_times(std::initializer_list<double> times, Direction d = Direction::Download) {
    Trace t;
    for (double x : times) t.packets.push_back({x, d});
    return t;
}

}  // namespace

TEST_CASE("quantiles") {
    CHECK(quantile({0, 1, 2, 3}, 0.25) == doctest::Approx(0.75));
    CHECK(quantile({0, 1, 2, 3}, 0.75) == doctest::Approx(2.25));
    CHECK(quantile({5}, 0.5) == 5.0);
    CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);

    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> v(rng.uniform_int(1, 50));
        for (auto& x : v) x = rng.uniform(-10, 10);
        const double q = rng.uniform01();
        CHECK(quantile(v, q) == doctest::Approx(oracle_quantile(v, q)));
    }
}

TEST_CASE("trace stats: IQR on four evenly spaced points") {
    const auto s = trace_stats(from_times({0, 1, 2, 3}));
    CHECK(s.time_iqr == doctest::Approx(oracle_quantile({0, 1, 2, 3}, 0.75) -
                                        oracle_quantile({0, 1, 2, 3}, 0.25)));
    CHECK(s.time_iqr == doctest::Approx(1.5));
    CHECK(s.duration == 3.0);
    CHECK(s.packet_count == 4);
}

TEST_CASE("trace stats: download/upload ratio") {
    Trace t;
    for (int i = 0; i < 70; ++i)
        t.packets.push_back({0.01 * i, i < 10 ? Direction::Upload : Direction::Download});
    const auto s = trace_stats(t);
    CHECK(s.download_count == 60);
    CHECK(s.upload_count == 10);
    CHECK(s.download_upload_ratio == doctest::Approx(6.0));
    CHECK(std::isinf(trace_stats(from_times({0, 1})).download_upload_ratio));
}

TEST_CASE("trace stats: per-second bins") {
    const auto one = trace_stats(from_times({0, 0.3, 0.999}));
    CHECK(one.per_second_bins.size() == 1);
    CHECK(one.per_second_bins[0].download == 3);

    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto t = testing::random_trace(rng, 200);
        if (t.empty()) continue;
        const auto s = trace_stats(t);
        std::size_t up = 0, down = 0;
        for (const auto& b : s.per_second_bins) {
            up += b.upload;
            down += b.download;
        }
        CHECK(up == s.upload_count);
        CHECK(down == s.download_count);
        CHECK(s.per_second_bins.size() == static_cast<std::size_t>(std::floor(t.duration())) + 1);
    }
    CHECK_THROWS_AS(trace_stats(Trace{}), DataError);
}

TEST_CASE("dataset stats") {
    Dataset ds;
    ds.traces = {from_times({0, 1, 2, 3}), from_times({0, 1, 2, 3}), from_times({0, 1, 2, 3})};
    const auto s = dataset_stats(ds);
    CHECK(s.trace_count == 3);
    CHECK(s.median_iqr == doctest::Approx(1.5));
    CHECK(s.mean_packet_count == 4.0);
    CHECK(s.mean_duration == 3.0);
    CHECK_THROWS_AS(dataset_stats(Dataset{}), DataError);
}

TEST_CASE("post-10th-packet profile") {
    Dataset ds;
    Trace same;
    for (int i = 0; i < 20; ++i) same.packets.push_back({0.0, Direction::Download});
    ds.traces.push_back(same);
    ds.traces.push_back(from_times({0, 1, 2, 3, 4, 5, 6, 7, 8}));

    const auto p = post_tenth_packet_profile(ds);
    CHECK(p.median_offset == 0.0);
    CHECK(p.skipped_traces == 1);
    CHECK(p.pooled_packets == 10);
    REQUIRE(p.histogram.size() == 1);
    CHECK(p.histogram[0] == 10);
}

TEST_CASE("post-10th-packet profile offsets") {
    Trace t;
    for (int i = 0; i < 10; ++i) t.packets.push_back({0.1 * i, Direction::Download});
    for (double x : {1.4, 2.9, 3.0, 7.9}) t.packets.push_back({x, Direction::Upload});
    Dataset ds;
    ds.traces.push_back(t);
    const auto p = post_tenth_packet_profile(ds, 1.0);
    // Offsets from the 10th packet at 0.9: 0.5, 2.0, 2.1, 7.0
    CHECK(p.pooled_packets == 4);
    CHECK(p.median_offset == doctest::Approx(2.05));
    REQUIRE(p.histogram.size() == 8);
    CHECK(p.histogram[0] == 1);
    CHECK(p.histogram[2] == 2);
    CHECK(p.histogram[7] == 1);
    CHECK_THROWS_AS(post_tenth_packet_profile(ds, 0.0), std::invalid_argument);
}

TEST_CASE("volume adjustment") {
    const auto heavy = regulator_heavy();
    const auto adjusted = volume_adjustment(1000.0, 2431.0, heavy);
    CHECK(adjusted.initial_rate == doctest::Approx(277.0 * 2.431));
    CHECK(std::lround(adjusted.initial_rate) == 673);
    // Proportional scaling of the budget.
    CHECK(adjusted.max_budget == 8630);
    CHECK(adjusted.decay == heavy.decay);
    CHECK(adjusted.surge_threshold == heavy.surge_threshold);
    CHECK(adjusted.upload_ratio == heavy.upload_ratio);
    CHECK(adjusted.delay_cap == heavy.delay_cap);

    CHECK(volume_adjustment(2100.9, 2100.9, heavy) == heavy);
    CHECK_THROWS_AS(volume_adjustment(0.0, 10.0, heavy), std::invalid_argument);
    CHECK_THROWS_AS(volume_adjustment(10.0, -1.0, heavy), std::invalid_argument);
}

TEST_CASE("CSV writers emit a header and one row per item") {
    Dataset ds;
    auto a = from_times({0, 1, 2, 3});
    a.name = "0-0";
    ds.traces.push_back(a);
    const auto s = dataset_stats(ds);
    std::ostringstream stats_csv, bins_csv, profile_csv;
    write_trace_stats_csv(stats_csv, ds, s);
    write_second_bins_csv(bins_csv, ds, s);
    write_offset_profile_csv(profile_csv, post_tenth_packet_profile(ds));
    const auto lines = [](const std::string& x) { return std::count(x.begin(), x.end(), '\n'); };
    CHECK(lines(stats_csv.str()) == 2);
    CHECK(lines(bins_csv.str()) == 5);
    CHECK(lines(profile_csv.str()) >= 1);
}
