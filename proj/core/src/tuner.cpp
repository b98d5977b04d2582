#include "wfshape/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wfshape/defense.hpp"
#include "wfshape/metrics.hpp"
#include "wfshape/parallel.hpp"
#include "wfshape/rng.hpp"

namespace wfshape {

void LossWeights::validate() const {
    for (double w : {accuracy, bandwidth, latency})
        if (!(w >= 0) || !std::isfinite(w))
            throw std::invalid_argument("loss weights must be finite and non-negative");
    if (accuracy == 0 && bandwidth == 0 && latency == 0)
        throw std::invalid_argument("at least one loss weight must be positive");
}

void SearchSpace::validate() const {
    auto check = [](const Interval& iv, const char* name, double floor_excl, double ceil_incl) {
        if (!(iv.lo <= iv.hi))
            throw std::invalid_argument(std::string("empty search interval for ") + name);
        if (!(iv.lo > floor_excl) || !(iv.hi <= ceil_incl))
            throw std::invalid_argument(std::string("search interval out of range for ") + name);
    };
    const double inf = std::numeric_limits<double>::max();
    check(initial_rate, "R", 0.0, inf);
    check(decay, "D", 0.0, 1.0);
    check(surge_threshold, "T", 0.0, inf);
    check(max_budget, "N", -1.0, inf);
    check(upload_ratio, "U", 0.0, inf);
    check(delay_cap, "C", 0.0, inf);
    if (std::ceil(max_budget.lo) > std::floor(max_budget.hi))
        throw std::invalid_argument("search interval for N contains no integer");
}

double loss(const LossWeights& w, double accuracy, double bandwidth, double latency) {
    return w.accuracy * accuracy + w.bandwidth * bandwidth + w.latency * latency;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(index));
}

RegulatorParams sample_params(const SearchSpace& space, std::uint64_t seed) {
    Rng rng(seed);
    RegulatorParams p;
    p.initial_rate = rng.uniform(space.initial_rate.lo, space.initial_rate.hi);
    p.decay = rng.uniform(space.decay.lo, space.decay.hi);
    if (p.decay <= 0) p.decay = space.decay.hi;
    p.surge_threshold = rng.uniform(space.surge_threshold.lo, space.surge_threshold.hi);
    p.max_budget = rng.uniform_int(static_cast<std::uint64_t>(std::ceil(space.max_budget.lo)),
                                   static_cast<std::uint64_t>(std::floor(space.max_budget.hi)));
    p.upload_ratio = rng.uniform(space.upload_ratio.lo, space.upload_ratio.hi);
    p.delay_cap = rng.uniform(space.delay_cap.lo, space.delay_cap.hi);
    return p;
}

TrialRecord run_trial(const Dataset& dataset, const LossWeights& weights, std::size_t index,
                      std::uint64_t master_seed, const SearchSpace& space,
                      const SearchOptions& options) {
    TrialRecord rec;
    rec.index = index;
    rec.seed = trial_seed(master_seed, index);
    rec.params = sample_params(space, rec.seed);

    const Defense defense("regulator", rec.params);
    const auto defended = defend_dataset(dataset, defense, rec.seed, 1);
    const auto overhead = dataset_overhead(dataset, defended);

    std::vector<FeatureVector> features;
    std::vector<std::string> labels;
    features.reserve(defended.size());
    for (std::size_t i = 0; i < defended.size(); ++i) {
        features.push_back(extract_features(defended[i]));
        labels.push_back(dataset.traces[i].label);
    }
    EvalOptions eval;
    eval.k = options.k;
    eval.folds = options.folds;
    eval.seed = rec.seed;
    rec.accuracy = evaluate_features(features, labels, eval).accuracy;
    rec.mean_bandwidth = overhead.mean_bandwidth;
    rec.mean_latency = overhead.mean_estimated_latency;
    rec.loss = loss(weights, rec.accuracy, rec.mean_bandwidth, rec.mean_latency);
    return rec;
}

void sort_by_loss(std::vector<TrialRecord>& trials) {
    std::stable_sort(trials.begin(), trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
        if (a.loss != b.loss) return a.loss < b.loss;
        return a.index < b.index;
    });
}

std::vector<TrialRecord> run_trials(const Dataset& dataset, const SearchSpace& space,
                                    const LossWeights& weights,
                                    const std::vector<std::size_t>& indices, std::uint64_t seed,
                                    const SearchOptions& options) {
    space.validate();
    weights.validate();
    std::vector<TrialRecord> out(indices.size());
    parallel_for(indices.size(), options.jobs, [&](std::size_t i) {
        out[i] = run_trial(dataset, weights, indices[i], seed, space, options);
    });
    sort_by_loss(out);
    return out;
}

std::vector<TrialRecord> random_search(const Dataset& dataset, const SearchSpace& space,
                                       const LossWeights& weights, std::size_t trials,
                                       std::uint64_t seed, const SearchOptions& options) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    std::vector<std::size_t> indices(trials);
    for (std::size_t i = 0; i < trials; ++i) indices[i] = i;
    return run_trials(dataset, space, weights, indices, seed, options);
}

std::string to_log_line(const TrialRecord& t) {
    nlohmann::ordered_json j;
    j["trial"] = t.index;
    j["seed"] = t.seed;
    j["R"] = t.params.initial_rate;
    j["D"] = t.params.decay;
    j["T"] = t.params.surge_threshold;
    j["N"] = t.params.max_budget;
    j["U"] = t.params.upload_ratio;
    j["C"] = t.params.delay_cap;
    j["accuracy"] = t.accuracy;
    j["bandwidth"] = t.mean_bandwidth;
    j["latency"] = t.mean_latency;
    j["loss"] = t.loss;
    return j.dump();
}

TrialRecord parse_log_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    TrialRecord t;
    t.index = j.at("trial").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.params.initial_rate = j.at("R").get<double>();
    t.params.decay = j.at("D").get<double>();
    t.params.surge_threshold = j.at("T").get<double>();
    t.params.max_budget = j.at("N").get<std::uint64_t>();
    t.params.upload_ratio = j.at("U").get<double>();
    t.params.delay_cap = j.at("C").get<double>();
    t.accuracy = j.at("accuracy").get<double>();
    t.mean_bandwidth = j.at("bandwidth").get<double>();
    t.mean_latency = j.at("latency").get<double>();
    t.loss = j.at("loss").get<double>();
    return t;
}

namespace {

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) continue;
        std::vector<double> values;
        for (double v; fields >> v;) values.push_back(v);
        if (!fields.eof())
            throw ParseError(line_no, "non-numeric value for '" + key + "'");
        fn(line_no, key, values);
    }
}

}  // namespace

SearchSpace parse_search_space(std::istream& in) {
    SearchSpace space;
    for_each_record(in, [&](std::size_t line_no, const std::string& key,
                            const std::vector<double>& v) {
        if (v.size() != 2) throw ParseError(line_no, "expected '<key> <lo> <hi>'");
        Interval iv{v[0], v[1]};
        if (key == "R") space.initial_rate = iv;
        else if (key == "D") space.decay = iv;
        else if (key == "T") space.surge_threshold = iv;
        else if (key == "N") space.max_budget = iv;
        else if (key == "U") space.upload_ratio = iv;
        else if (key == "C") space.delay_cap = iv;
        else throw ParseError(line_no, "unknown parameter '" + key + "'");
    });
    space.validate();
    return space;
}

LossWeights parse_loss_weights(std::istream& in) {
    LossWeights w;
    for_each_record(in, [&](std::size_t line_no, const std::string& key,
                            const std::vector<double>& v) {
        if (v.size() != 1) throw ParseError(line_no, "expected '<name> <weight>'");
        if (key == "accuracy") w.accuracy = v[0];
        else if (key == "bandwidth") w.bandwidth = v[0];
        else if (key == "latency") w.latency = v[0];
        else throw ParseError(line_no, "unknown weight '" + key + "'");
    });
    w.validate();
    return w;
}

}  // namespace wfshape
