#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "wfshape/synth.hpp"
#include "wfshape/trace.hpp"

namespace fs = std::filesystem;
using namespace wfshape;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "wfshape");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Workspace {
    fs::path root;
    Workspace() {
        root = fs::temp_directory_path() /
               ("wfshape-cli-" + std::to_string(std::random_device{}()));
        fs::create_directories(root);
    }
    ~Workspace() { fs::remove_all(root); }
    std::string path(const std::string& name) const { return (root / name).string(); }
};

void write_three_traces(const fs::path& dir) {
    fs::create_directories(dir);
    const auto ds = generate(separable_profiles(2), 2, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        std::ofstream out(dir / ds.traces[i].name);
        write_trace(out, ds.traces[i]);
    }
}

}  // namespace

TEST_CASE("simulate writes one defended file per input, reproducibly") {
    Workspace ws;
    write_three_traces(ws.path("in"));
    const auto a = run_cli({"simulate", ws.path("in"), "--defense", "regulator-heavy", "--seed",
                            "7", "--out", ws.path("a")});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("mean_bandwidth") != std::string::npos);
    const auto b = run_cli({"simulate", ws.path("in"), "--defense", "regulator-heavy", "--seed",
                            "7", "--out", ws.path("b"), "--jobs", "3"});
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);

    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(ws.path("a"))) {
        ++files;
        const auto name = e.path().filename();
        CHECK(fs::exists(ws.root / "in" / name));
        CHECK(slurp(e.path()) == slurp(ws.root / "b" / name));
    }
    CHECK(files == 3);
}

TEST_CASE("simulate usage errors") {
    Workspace ws;
    write_three_traces(ws.path("in"));
    CHECK(run_cli({"simulate", ws.path("in"), "--defense", "nosuch", "--seed", "1", "--out",
                   ws.path("o")})
              .code == 1);
    CHECK(run_cli({"simulate", ws.path("in"), "--defense", "regulator-heavy", "--out",
                   ws.path("o")})
              .code == 1);
    CHECK(run_cli({"simulate", ws.path("missing"), "--defense", "tamaraw", "--out", ws.path("o")})
              .code == 2);
    CHECK(run_cli({"nosuchcommand"}).code == 1);
}

TEST_CASE("simulate with overrides and overhead on the written files") {
    Workspace ws;
    write_three_traces(ws.path("in"));
    REQUIRE(run_cli({"simulate", ws.path("in"), "--defense", "regulator", "--N", "0", "--seed",
                     "2", "--out", ws.path("d"), "--summary", ws.path("summary.csv")})
                .code == 0);
    CHECK(fs::exists(ws.path("summary.csv")));
    const auto r = run_cli({"overhead", ws.path("in"), ws.path("d"), "--csv", ws.path("o.csv")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("mean_bandwidth") != std::string::npos);
    CHECK(fs::exists(ws.path("o.csv")));
}

TEST_CASE("stats") {
    Workspace ws;
    write_three_traces(ws.path("in"));
    const auto r = run_cli({"stats", ws.path("in"), "--out", ws.path("tables")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("median_time_iqr=") != std::string::npos);
    CHECK(fs::exists(ws.root / "tables" / "trace_stats.csv"));
    CHECK(fs::exists(ws.root / "tables" / "second_bins.csv"));
    CHECK(fs::exists(ws.root / "tables" / "post_tenth_profile.csv"));

    fs::create_directories(ws.path("empty"));
    CHECK(run_cli({"stats", ws.path("empty")}).code == 2);
}

TEST_CASE("eval") {
    Workspace ws;
    REQUIRE(run_cli({"synth", "--out", ws.path("syn"), "--seed", "1", "--classes", "3",
                     "--instances", "6"})
                .code == 0);
    const auto a = run_cli({"eval", ws.path("syn"), "--seed", "4", "--folds", "3", "--k", "3"});
    REQUIRE(a.code == 0);
    const auto b = run_cli({"eval", ws.path("syn"), "--seed", "4", "--folds", "3", "--k", "3",
                            "--jobs", "2"});
    CHECK(a.out == b.out);
    CHECK(run_cli({"eval", ws.path("syn"), "--seed", "4", "--folds", "10"}).code == 2);
    CHECK(run_cli({"eval", ws.path("syn"), "--folds", "3"}).code == 1);
}

TEST_CASE("tune is resumable") {
    Workspace ws;
    REQUIRE(run_cli({"synth", "--out", ws.path("syn"), "--seed", "1", "--classes", "2",
                     "--instances", "4"})
                .code == 0);
    const std::vector<std::string> cmd = {"tune", ws.path("syn"), "--trials", "2", "--seed", "5",
                                          "--folds", "2", "--k", "1", "--out", ws.path("log")};
    REQUIRE(run_cli(cmd).code == 0);
    const auto first = slurp(ws.path("log"));
    CHECK(std::count(first.begin(), first.end(), '\n') == 2);

    const auto again = run_cli(cmd);
    REQUIRE(again.code == 0);
    CHECK(again.out.find("ran=0") != std::string::npos);
    CHECK(slurp(ws.path("log")) == first);

    auto other_seed = cmd;
    other_seed[5] = "6";
    CHECK(run_cli(other_seed).code == 2);

    auto missing_weights = cmd;
    missing_weights.push_back("--weights");
    missing_weights.push_back(ws.path("nope.txt"));
    CHECK(run_cli(missing_weights).code == 2);
}

TEST_CASE("adjust") {
    const auto r = run_cli({"adjust", "--preset", "regulator-heavy", "--ratio", "2.431"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("R_rounded=673\n") != std::string::npos);
    CHECK(r.out.find("N=8630\n") != std::string::npos);

    const auto id = run_cli({"adjust", "--preset", "regulator-heavy", "--ratio", "1"});
    REQUIRE(id.code == 0);
    CHECK(id.out.find("R=277.000\n") != std::string::npos);
    CHECK(id.out.find("N=3550\n") != std::string::npos);

    const auto counts =
        run_cli({"adjust", "--preset", "regulator-heavy", "--reference", "1000", "--target",
                 "2431"});
    CHECK(counts.out.find("R_rounded=673\n") != std::string::npos);

    CHECK(run_cli({"adjust", "--preset", "regulator-heavy", "--ratio", "0"}).code == 1);
    CHECK(run_cli({"adjust", "--preset", "regulator-heavy", "--ratio", "-2"}).code == 1);
    CHECK(run_cli({"adjust", "--preset", "tamaraw", "--ratio", "2"}).code == 1);
}

TEST_CASE("synth is reproducible") {
    Workspace ws;
    REQUIRE(run_cli({"synth", "--out", ws.path("a"), "--seed", "9", "--classes", "2",
                     "--instances", "2"})
                .code == 0);
    REQUIRE(run_cli({"synth", "--out", ws.path("b"), "--seed", "9", "--classes", "2",
                     "--instances", "2"})
                .code == 0);
    for (const auto& e : fs::directory_iterator(ws.path("a")))
        CHECK(slurp(e.path()) == slurp(ws.root / "b" / e.path().filename()));
}
