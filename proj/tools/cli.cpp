#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wfshape/attack.hpp"
#include "wfshape/defense.hpp"
#include "wfshape/metrics.hpp"
#include "wfshape/stats.hpp"
#include "wfshape/synth.hpp"
#include "wfshape/trace.hpp"
#include "wfshape/tuner.hpp"

namespace wfshape::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::optional<double> rate, decay, threshold, ratio, cap;
    std::optional<std::uint64_t> budget;

    bool any() const { return rate || decay || threshold || ratio || cap || budget; }

    void add_to(CLI::App& app) {
        app.add_option("--R", rate, "Override the initial surge rate (packets/s)");
        app.add_option("--D", decay, "Override the decay rate");
        app.add_option("--T", threshold, "Override the surge threshold");
        app.add_option("--N", budget, "Override the maximum padding budget");
        app.add_option("--U", ratio, "Override the download/upload ratio");
        app.add_option("--C", cap, "Override the upload delay cap (s)");
    }

    RegulatorParams apply(RegulatorParams p) const {
        if (rate) p.initial_rate = *rate;
        if (decay) p.decay = *decay;
        if (threshold) p.surge_threshold = *threshold;
        if (budget) p.max_budget = *budget;
        if (ratio) p.upload_ratio = *ratio;
        if (cap) p.delay_cap = *cap;
        p.validate();
        return p;
    }
};

Defense resolve_defense(const std::string& name, const Overrides& overrides) {
    // "regulator" is the heavy preset, meant to be combined with overrides.
    auto preset = find_preset(name == "regulator" ? "regulator-heavy" : name);
    if (!preset) {
        std::string known;
        for (const auto& n : preset_names()) known += " " + n;
        throw UsageError("unknown defense '" + name + "'; known:" + known + " regulator");
    }
    if (!overrides.any()) return *preset;
    const auto* params = std::get_if<RegulatorParams>(&preset->config());
    if (!params) throw UsageError("parameter overrides apply only to regulator defenses");
    return Defense(name, overrides.apply(*params));
}

void require_seed(const std::optional<std::uint64_t>& seed, const std::string& what) {
    if (!seed) throw UsageError(what + " is randomized; --seed is required");
}

Dataset load(const fs::path& dir, char separator, unsigned jobs, std::ostream& err) {
    LoadOptions options;
    options.label_separator = separator;
    options.jobs = jobs;
    auto result = load_dataset(dir, options);
    for (const auto& w : result.warnings) err << "warning: skipped " << w << '\n';
    if (result.skipped > 0) err << "warning: " << result.skipped << " file(s) skipped\n";
    return std::move(result.dataset);
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::vector<std::string> names_of(const Dataset& dataset) {
    std::vector<std::string> names;
    for (const auto& t : dataset.traces) names.push_back(t.name);
    return names;
}

struct Common {
    std::string input;
    std::string out;
    std::string defense = "none";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    char separator = '-';
    Overrides overrides;
};

void add_jobs(CLI::App& app, Common& c) {
    app.add_option("--jobs,-j", c.jobs, "Worker threads (results never depend on this)")
        ->check(CLI::PositiveNumber);
}

void add_separator(CLI::App& app, Common& c) {
    app.add_option("--separator", c.separator, "Label separator in trace file names");
}

int cmd_simulate(const Common& c, const std::string& summary_path, std::ostream& out,
                 std::ostream& err) {
    const auto defense = resolve_defense(c.defense, c.overrides);
    if (defense.randomized()) require_seed(c.seed, "defense '" + defense.name() + "'");
    const auto dataset = load(c.input, c.separator, c.jobs, err);
    const auto seed = c.seed.value_or(0);
    auto defended = defend_dataset(dataset, defense, seed, c.jobs);

    const fs::path out_dir(c.out);
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto file = open_output(out_dir / dataset.traces[i].name);
        write_defended_trace(file, defended[i]);
    }

    const auto overhead = dataset_overhead(dataset, defended);
    out << "defense=" << defense.name() << '\n' << "seed=" << seed << '\n';
    write_report_kv(out, overhead);
    if (!summary_path.empty()) {
        auto file = open_output(summary_path);
        write_report_csv(file, overhead, names_of(dataset));
    }
    return kOk;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_overhead(const Common& c, const std::string& defended_dir, const std::string& csv_path,
                 std::ostream& out, std::ostream& err) {
    const auto dataset = load(c.input, c.separator, c.jobs, err);
    std::vector<DefendedTrace> defended;
    for (const auto& t : dataset.traces) {
        const auto path = fs::path(defended_dir) / t.name;
        DefendedTrace d;
        try {
            d = parse_defended_trace(read_file(path));
            attach_sources(t, d);
        } catch (const ParseError& e) {
            throw DataError(path.string() + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ": " + e.what());
        }
        defended.push_back(std::move(d));
    }
    const auto overhead = dataset_overhead(dataset, defended);
    write_report_kv(out, overhead);
    if (!csv_path.empty()) {
        auto file = open_output(csv_path);
        write_report_csv(file, overhead, names_of(dataset));
    }
    return kOk;
}

int cmd_stats(const Common& c, double bin_width, std::ostream& out, std::ostream& err) {
    const auto dataset = load(c.input, c.separator, c.jobs, err);
    const auto stats = dataset_stats(dataset);
    const auto profile = post_tenth_packet_profile(dataset, bin_width);

    out << "traces=" << stats.trace_count << '\n'
        << "mean_packet_count=" << stats.mean_packet_count << '\n'
        << "mean_duration=" << stats.mean_duration << '\n'
        << "median_time_iqr=" << stats.median_iqr << '\n'
        << "download_upload_ratio=" << stats.download_upload_ratio << '\n'
        << "median_post_tenth_offset=" << profile.median_offset << '\n'
        << "post_tenth_skipped=" << profile.skipped_traces << '\n';

    if (!c.out.empty()) {
        const fs::path dir(c.out);
        fs::create_directories(dir);
        auto traces = open_output(dir / "trace_stats.csv");
        write_trace_stats_csv(traces, dataset, stats);
        auto bins = open_output(dir / "second_bins.csv");
        write_second_bins_csv(bins, dataset, stats);
        auto offsets = open_output(dir / "post_tenth_profile.csv");
        write_offset_profile_csv(offsets, profile);
    }
    return kOk;
}

int cmd_eval(const Common& c, std::size_t k, std::size_t folds, const std::string& features_path,
             std::ostream& out, std::ostream& err) {
    const auto defense = resolve_defense(c.defense, c.overrides);
    require_seed(c.seed, "eval");
    const auto dataset = load(c.input, c.separator, c.jobs, err);

    EvalOptions options;
    options.k = k;
    options.folds = folds;
    options.seed = *c.seed;
    options.jobs = c.jobs;

    std::vector<FeatureVector> features(dataset.size());
    std::vector<std::string> labels(dataset.size());
    const auto defended = defend_dataset(dataset, defense, options.seed, c.jobs);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        features[i] = extract_features(defended[i]);
        labels[i] = dataset.traces[i].label;
    }
    if (!features_path.empty()) {
        auto file = open_output(features_path);
        write_feature_matrix_csv(file, features, labels);
    }
    const auto result = evaluate_features(features, labels, options);

    out << "defense=" << defense.name() << '\n'
        << "classifier=knn k=" << options.k << '\n'
        << "folds=" << result.fold_count << '\n'
        << "instances=" << result.instance_count << '\n'
        << "accuracy=" << result.accuracy << '\n'
        << "class,accuracy\n";
    for (const auto& [label, acc] : result.per_class_accuracy) out << label << ',' << acc << '\n';
    return kOk;
}

int cmd_tune(const Common& c, const std::string& space_path, const std::string& weights_path,
             std::size_t trials, std::size_t k, std::size_t folds, std::ostream& out,
             std::ostream& err) {
    require_seed(c.seed, "tune");
    if (trials < 1) throw UsageError("--trials must be >= 1");

    SearchSpace space;
    if (!space_path.empty()) {
        std::ifstream in(space_path);
        if (!in) throw DataError("cannot open search space file " + space_path);
        space = parse_search_space(in);
    }
    LossWeights weights;
    if (!weights_path.empty()) {
        std::ifstream in(weights_path);
        if (!in) throw DataError("cannot open weights file " + weights_path);
        weights = parse_loss_weights(in);
    }

    std::set<std::size_t> done;
    if (fs::exists(c.out)) {
        std::ifstream in(c.out);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto rec = parse_log_line(line);
            if (rec.seed != trial_seed(*c.seed, rec.index))
                throw DataError(c.out + " was written with a different --seed");
            done.insert(rec.index);
        }
    }
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < trials; ++i)
        if (!done.contains(i)) pending.push_back(i);

    std::vector<TrialRecord> records;
    if (!pending.empty()) {
        const auto dataset = load(c.input, c.separator, 1, err);
        SearchOptions options;
        options.k = k;
        options.folds = folds;
        options.jobs = c.jobs;
        records = run_trials(dataset, space, weights, pending, *c.seed, options);
        std::ofstream log(c.out, std::ios::binary | std::ios::app);
        if (!log) throw DataError("cannot write " + c.out);
        for (const auto& r : records) log << to_log_line(r) << '\n';
    }

    out << "completed_before=" << done.size() << '\n' << "ran=" << records.size() << '\n';
    if (!records.empty()) {
        const auto& best = records.front();
        out << "best_trial=" << best.index << '\n'
            << "best_loss=" << best.loss << '\n'
            << "best_params=" << describe(best.params) << '\n';
    }
    return kOk;
}

int cmd_adjust(const std::string& preset, const Overrides& overrides, std::optional<double> ratio,
               std::optional<double> reference, std::optional<double> target, std::ostream& out) {
    const auto defense = resolve_defense(preset, overrides);
    const auto* params = std::get_if<RegulatorParams>(&defense.config());
    if (!params) throw UsageError("adjust needs a regulator preset");

    double ref = 1.0;
    double tgt = 1.0;
    if (ratio) {
        if (reference || target) throw UsageError("give either --ratio or --reference/--target");
        tgt = *ratio;
    } else if (reference && target) {
        ref = *reference;
        tgt = *target;
    } else {
        throw UsageError("adjust needs --ratio or both --reference and --target");
    }
    if (!(ref > 0) || !(tgt > 0)) throw UsageError("volume ratio must be positive");

    const auto adjusted = volume_adjustment(ref, tgt, *params);
    out.setf(std::ios::fixed);
    out.precision(3);
    out << "ratio=" << tgt / ref << '\n'
        << "R=" << adjusted.initial_rate << '\n'
        << "R_rounded=" << std::llround(adjusted.initial_rate) << '\n'
        << "D=" << adjusted.decay << '\n'
        << "T=" << adjusted.surge_threshold << '\n'
        << "N=" << adjusted.max_budget << '\n'
        << "U=" << adjusted.upload_ratio << '\n'
        << "C=" << adjusted.delay_cap << '\n';
    out.unsetf(std::ios::fixed);
    return kOk;
}

int cmd_synth(const Common& c, std::size_t classes, std::size_t instances, std::ostream& out) {
    require_seed(c.seed, "synth");
    if (classes < 1 || instances < 1) throw UsageError("--classes and --instances must be >= 1");
    const auto dataset = generate(separable_profiles(classes), instances, *c.seed);
    save_dataset(c.out, dataset);
    out << "traces=" << dataset.size() << '\n' << "out=" << c.out << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Website-fingerprinting defense simulator and evaluation toolkit", "wfshape"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "wfshape 0.1.0");

    Common c;

    auto* simulate = app.add_subcommand("simulate", "Apply a defense to every trace of a dataset");
    std::string summary_path;
    simulate->add_option("input", c.input, "Directory of trace files")->required();
    simulate->add_option("--defense,--preset", c.defense, "Defense or preset name")->required();
    simulate->add_option("--seed", c.seed, "Master seed");
    simulate->add_option("--out,-o", c.out, "Output directory for defended traces")->required();
    simulate->add_option("--summary", summary_path, "Per-trace overhead CSV");
    add_jobs(*simulate, c);
    add_separator(*simulate, c);
    c.overrides.add_to(*simulate);

    auto* overhead = app.add_subcommand("overhead", "Overheads of a defended dataset on disk");
    std::string defended_dir, csv_path;
    overhead->add_option("original", c.input, "Undefended dataset directory")->required();
    overhead->add_option("defended", defended_dir, "Defended dataset directory")->required();
    overhead->add_option("--csv", csv_path, "Per-trace overhead CSV");
    add_jobs(*overhead, c);
    add_separator(*overhead, c);

    auto* stats = app.add_subcommand("stats", "Traffic-pattern statistics of a dataset");
    double bin_width = 1.0;
    stats->add_option("input", c.input, "Directory of trace files")->required();
    stats->add_option("--out,-o", c.out, "Directory for plot-ready CSV tables");
    stats->add_option("--bin-width", bin_width, "Post-10th-packet histogram bin width (s)")
        ->check(CLI::PositiveNumber);
    add_jobs(*stats, c);
    add_separator(*stats, c);

    auto* eval = app.add_subcommand("eval", "Closed-world kNN attack accuracy");
    std::size_t k = 5, folds = 10;
    std::string features_path;
    eval->add_option("input", c.input, "Directory of trace files")->required();
    eval->add_option("--defense,--preset", c.defense, "Defense to apply first (default none)");
    eval->add_option("--seed", c.seed, "Master seed")->required();
    eval->add_option("--k", k, "Neighbours")->check(CLI::PositiveNumber);
    eval->add_option("--folds", folds, "Cross-validation folds")->check(CLI::Range(2, 1000000));
    eval->add_option("--features", features_path, "Export the feature matrix as CSV");
    add_jobs(*eval, c);
    add_separator(*eval, c);
    c.overrides.add_to(*eval);

    auto* tune = app.add_subcommand("tune", "Random search over regulator parameters");
    std::string space_path, weights_path;
    std::size_t trials = 10;
    std::size_t tune_k = 5, tune_folds = 10;
    tune->add_option("input", c.input, "Directory of trace files")->required();
    tune->add_option("--space", space_path, "Search space file (`R lo hi` lines)");
    tune->add_option("--weights", weights_path, "Loss weights file (`accuracy w` lines)");
    tune->add_option("--trials", trials, "Number of trials")->required();
    tune->add_option("--seed", c.seed, "Master seed")->required();
    tune->add_option("--out,-o", c.out, "Trial log (appended, resumable)")->required();
    tune->add_option("--k", tune_k, "Neighbours")->check(CLI::PositiveNumber);
    tune->add_option("--folds", tune_folds, "Cross-validation folds")
        ->check(CLI::Range(2, 1000000));
    add_jobs(*tune, c);
    add_separator(*tune, c);

    auto* adjust = app.add_subcommand("adjust", "Scale R and N to a different traffic volume");
    std::string preset = "regulator-heavy";
    std::optional<double> ratio, reference, target;
    Overrides adjust_overrides;
    adjust->add_option("--preset,--defense", preset, "Regulator preset");
    adjust->add_option("--ratio", ratio, "target / reference volume");
    adjust->add_option("--reference", reference, "Mean packets per trace the preset was tuned on");
    adjust->add_option("--target", target, "Mean packets per trace of the target traffic");
    adjust_overrides.add_to(*adjust);

    auto* synth = app.add_subcommand("synth", "Write a synthetic surge-shaped dataset");
    std::size_t classes = 10, instances = 50;
    synth->add_option("--out,-o", c.out, "Output directory")->required();
    synth->add_option("--seed", c.seed, "Master seed")->required();
    synth->add_option("--classes", classes, "Number of page classes");
    synth->add_option("--instances", instances, "Instances per class");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*simulate) return cmd_simulate(c, summary_path, out, err);
        if (*overhead) return cmd_overhead(c, defended_dir, csv_path, out, err);
        if (*stats) return cmd_stats(c, bin_width, out, err);
        if (*eval) return cmd_eval(c, k, folds, features_path, out, err);
        if (*tune) return cmd_tune(c, space_path, weights_path, trials, tune_k, tune_folds, out, err);
        if (*adjust) return cmd_adjust(preset, adjust_overrides, ratio, reference, target, out);
        if (*synth) return cmd_synth(c, classes, instances, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsageError;
}

}  // namespace wfshape::cli
