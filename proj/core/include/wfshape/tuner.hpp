#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wfshape/attack.hpp"
#include "wfshape/regulator.hpp"
#include "wfshape/trace.hpp"

namespace wfshape {

struct LossWeights {
    double accuracy = 1.0;
    double bandwidth = 1.0;
    double latency = 1.0;

    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct SearchSpace {
    Interval initial_rate{100.0, 600.0};
    Interval decay{0.7, 0.99};
    Interval surge_threshold{1.0, 10.0};
    Interval max_budget{500.0, 8000.0};
    Interval upload_ratio{1.0, 8.0};
    Interval delay_cap{0.5, 5.0};

    /// Throws std::invalid_argument for empty or out-of-range intervals.
    void validate() const;
};

struct TrialRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    RegulatorParams params;
    double loss = 0.0;
    double accuracy = 0.0;
    double mean_bandwidth = 0.0;
    double mean_latency = 0.0;
};

double loss(const LossWeights& weights, double accuracy, double bandwidth, double latency);

struct SearchOptions {
    std::size_t k = 5;
    std::size_t folds = 10;
    unsigned jobs = 1;
};

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index);

/// Parameters for one trial; depends only on (space, trial seed).
RegulatorParams sample_params(const SearchSpace& space, std::uint64_t seed);

TrialRecord run_trial(const Dataset& dataset, const LossWeights& weights, std::size_t index,
                      std::uint64_t master_seed, const SearchSpace& space,
                      const SearchOptions& options);

/// Runs the listed trial indices (in parallel across trials) and returns them
/// sorted by loss, ties by index.
std::vector<TrialRecord> run_trials(const Dataset& dataset, const SearchSpace& space,
                                    const LossWeights& weights,
                                    const std::vector<std::size_t>& indices, std::uint64_t seed,
                                    const SearchOptions& options);

std::vector<TrialRecord> random_search(const Dataset& dataset, const SearchSpace& space,
                                       const LossWeights& weights, std::size_t trials,
                                       std::uint64_t seed, const SearchOptions& options = {});

void sort_by_loss(std::vector<TrialRecord>& trials);

/// One JSON object per line.
std::string to_log_line(const TrialRecord& trial);
TrialRecord parse_log_line(const std::string& line);

/// Reads `key lo hi` lines (keys R D T N U C); unspecified keys keep defaults.
SearchSpace parse_search_space(std::istream& in);
/// Reads `accuracy|bandwidth|latency <weight>` lines.
LossWeights parse_loss_weights(std::istream& in);

}  // namespace wfshape
