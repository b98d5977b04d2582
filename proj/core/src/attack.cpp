#include "wfshape/attack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "wfshape/parallel.hpp"
#include "wfshape/rng.hpp"

namespace wfshape {

namespace {

FeatureVector features_from_signs(const std::vector<int>& signs, double duration) {
    if (signs.size() < 2) throw DataError("feature extraction needs at least 2 packets");
    std::vector<double> cumulative(signs.size());
    double running = 0.0;
    std::size_t uploads = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
        running += signs[i];
        cumulative[i] = running;
        if (signs[i] > 0) ++uploads;
    }

    FeatureVector f;
    const double last = static_cast<double>(signs.size() - 1);
    for (std::size_t j = 0; j < kCumulativeSamples; ++j) {
        const double x = last * static_cast<double>(j) / static_cast<double>(kCumulativeSamples - 1);
        const auto lo = static_cast<std::size_t>(std::floor(x));
        const auto hi = std::min(lo + 1, signs.size() - 1);
        f[j] = cumulative[lo] + (x - static_cast<double>(lo)) * (cumulative[hi] - cumulative[lo]);
    }
    f[kCumulativeSamples + 0] = static_cast<double>(signs.size());
    f[kCumulativeSamples + 1] = static_cast<double>(uploads);
    f[kCumulativeSamples + 2] = static_cast<double>(signs.size() - uploads);
    f[kCumulativeSamples + 3] = duration;
    return f;
}

}  // namespace

FeatureVector extract_features(const Trace& trace) {
    std::vector<int> signs;
    signs.reserve(trace.size());
    for (const auto& p : trace.packets) signs.push_back(direction_sign(p.direction));
    const double duration =
        trace.empty() ? 0.0 : trace.packets.back().time - trace.packets.front().time;
    return features_from_signs(signs, duration);
}

FeatureVector extract_features(const DefendedTrace& trace) {
    std::vector<int> signs;
    signs.reserve(trace.size());
    for (const auto& p : trace.packets) signs.push_back(direction_sign(p.direction));
    const double duration =
        trace.packets.empty() ? 0.0
                              : trace.packets.back().send_time - trace.packets.front().send_time;
    return features_from_signs(signs, duration);
}

void MinMaxScaler::fit(const std::vector<FeatureVector>& rows) {
    if (rows.empty()) throw std::invalid_argument("cannot fit a scaler on no rows");
    min_ = rows.front().values;
    auto max = rows.front().values;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < kFeatureLength; ++i) {
            min_[i] = std::min(min_[i], r[i]);
            max[i] = std::max(max[i], r[i]);
        }
    }
    for (std::size_t i = 0; i < kFeatureLength; ++i) range_[i] = max[i] - min_[i];
}

FeatureVector MinMaxScaler::transform(const FeatureVector& row) const {
    FeatureVector out;
    for (std::size_t i = 0; i < kFeatureLength; ++i)
        out[i] = range_[i] > 0 ? (row[i] - min_[i]) / range_[i] : 0.0;
    return out;
}

namespace {

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kFeatureLength; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Majority label among the k nearest training rows. Vote ties go to the tied
// label whose nearest member is closest.
std::size_t knn_predict(const FeatureVector& query, const std::vector<FeatureVector>& train,
                        const std::vector<std::size_t>& train_labels, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) dist[i] = {squared_distance(query, train[i]), i};
    const std::size_t kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());

    std::map<std::size_t, std::pair<std::size_t, std::size_t>> votes;  // label -> (count, rank)
    for (std::size_t r = 0; r < kk; ++r) {
        auto [it, fresh] = votes.try_emplace(train_labels[dist[r].second], 0, r);
        ++it->second.first;
    }
    std::size_t best = votes.begin()->first;
    auto best_vote = votes.begin()->second;
    for (const auto& [label, vote] : votes) {
        if (vote.first > best_vote.first ||
            (vote.first == best_vote.first && vote.second < best_vote.second)) {
            best = label;
            best_vote = vote;
        }
    }
    return best;
}

}  // namespace

EvalResult evaluate_features(const std::vector<FeatureVector>& features,
                             const std::vector<std::string>& labels, const EvalOptions& options) {
    if (features.size() != labels.size())
        throw std::invalid_argument("feature and label counts differ");
    if (options.k < 1) throw std::invalid_argument("k must be >= 1");
    if (options.folds < 2) throw std::invalid_argument("folds must be >= 2");

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 2) throw DataError("closed-world evaluation needs at least 2 classes");

    std::vector<std::string> class_names;
    std::vector<std::size_t> class_of(labels.size());
    for (const auto& [name, members] : by_class) {
        if (members.size() < options.folds)
            throw DataError("class '" + name + "' has " + std::to_string(members.size()) +
                            " instances, fewer than " + std::to_string(options.folds) + " folds");
        for (auto i : members) class_of[i] = class_names.size();
        class_names.push_back(name);
    }

    // Stratified assignment: shuffle each class, then deal its members round-robin.
    std::vector<std::size_t> fold_of(labels.size());
    Rng rng(derive_seed(options.seed, std::string_view("folds")));
    for (auto& [name, members] : by_class) {
        auto shuffled = members;
        rng.shuffle(shuffled);
        for (std::size_t p = 0; p < shuffled.size(); ++p) fold_of[shuffled[p]] = p % options.folds;
    }

    std::vector<std::size_t> predicted(labels.size());
    double accuracy_sum = 0.0;
    for (std::size_t fold = 0; fold < options.folds; ++fold) {
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            (fold_of[i] == fold ? test_idx : train_idx).push_back(i);

        std::vector<FeatureVector> train_rows;
        std::vector<std::size_t> train_labels;
        for (auto i : train_idx) {
            train_rows.push_back(features[i]);
            train_labels.push_back(class_of[i]);
        }
        MinMaxScaler scaler;
        scaler.fit(train_rows);
        for (auto& r : train_rows) r = scaler.transform(r);

        parallel_for(test_idx.size(), options.jobs, [&](std::size_t t) {
            const auto i = test_idx[t];
            predicted[i] = knn_predict(scaler.transform(features[i]), train_rows, train_labels,
                                       options.k);
        });
        std::size_t correct = 0;
        for (auto i : test_idx) correct += predicted[i] == class_of[i];
        accuracy_sum += static_cast<double>(correct) / static_cast<double>(test_idx.size());
    }

    EvalResult result;
    result.fold_count = options.folds;
    result.instance_count = labels.size();
    result.accuracy = accuracy_sum / static_cast<double>(options.folds);
    for (const auto& [name, members] : by_class) {
        std::size_t correct = 0;
        for (auto i : members) correct += predicted[i] == class_of[i];
        result.per_class_accuracy[name] =
            static_cast<double>(correct) / static_cast<double>(members.size());
    }
    return result;
}

EvalResult evaluate_closed_world(const Dataset& dataset, const std::optional<Defense>& defense,
                                 const EvalOptions& options) {
    std::vector<FeatureVector> features(dataset.size());
    std::vector<std::string> labels(dataset.size());
    parallel_for(dataset.size(), options.jobs, [&](std::size_t i) {
        const auto& trace = dataset.traces[i];
        labels[i] = trace.label;
        if (defense) {
            features[i] = extract_features(defense->apply(trace, trace_seed(options.seed, trace, i)));
        } else {
            features[i] = extract_features(trace);
        }
    });
    return evaluate_features(features, labels, options);
}

void write_feature_matrix_csv(std::ostream& out, const std::vector<FeatureVector>& features,
                              const std::vector<std::string>& labels) {
    out << "label";
    for (std::size_t j = 0; j < kCumulativeSamples; ++j) out << ",cumul_" << j;
    out << ",total,uploads,downloads,duration\n";
    for (std::size_t i = 0; i < features.size(); ++i) {
        out << (i < labels.size() ? labels[i] : std::string());
        for (double v : features[i].values) out << ',' << v;
        out << '\n';
    }
}

}  // namespace wfshape
