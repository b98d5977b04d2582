#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfshape/defense.hpp"
#include "wfshape/trace.hpp"

namespace wfshape {

inline constexpr std::size_t kCumulativeSamples = 100;
inline constexpr std::size_t kSummaryFeatures = 4;
inline constexpr std::size_t kFeatureLength = kCumulativeSamples + kSummaryFeatures;

/// Cumulative-representation features: the signed running packet count
/// (+1 upload, -1 download) sampled at 100 evenly spaced packet indices,
/// followed by total, upload, download counts and duration.
struct FeatureVector {
    std::array<double, kFeatureLength> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

FeatureVector extract_features(const Trace& trace);
/// Dummies are included; on the wire they look like any other packet.
FeatureVector extract_features(const DefendedTrace& trace);

/// Per-feature min-max scaling fitted on a training set.
class MinMaxScaler {
public:
    void fit(const std::vector<FeatureVector>& rows);
    FeatureVector transform(const FeatureVector& row) const;

private:
    std::array<double, kFeatureLength> min_{};
    std::array<double, kFeatureLength> range_{};
};

struct EvalOptions {
    std::size_t k = 5;
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct EvalResult {
    double accuracy = 0.0;  // mean over folds
    std::map<std::string, double> per_class_accuracy;
    std::size_t fold_count = 0;
    std::size_t instance_count = 0;
};

/// Stratified k-fold cross-validation with a k-nearest-neighbour vote.
EvalResult evaluate_features(const std::vector<FeatureVector>& features,
                             const std::vector<std::string>& labels, const EvalOptions& options);

/// Optionally defends every trace first (seeded per trace from options.seed).
EvalResult evaluate_closed_world(const Dataset& dataset, const std::optional<Defense>& defense,
                                 const EvalOptions& options);

void write_feature_matrix_csv(std::ostream& out, const std::vector<FeatureVector>& features,
                              const std::vector<std::string>& labels);

}  // namespace wfshape
