#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/generators.hpp"
#include "wfshape/trace.hpp"

using namespace wfshape;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("wfshape-test-" + tag + "-" +
                                            std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
    }
};

}  // namespace

TEST_CASE("parse: direct transcription") {
    const auto t = parse_trace("0.0\t1\n0.5\t-1");
    REQUIRE(t.size() == 2);
    CHECK(t.packets[0] == Packet{0.0, Direction::Upload});
    CHECK(t.packets[1] == Packet{0.5, Direction::Download});
}

TEST_CASE("parse: normalized to t=0, size magnitude ignored") {
    const auto t = parse_trace("2.0\t1\n2.5\t-512");
    REQUIRE(t.size() == 2);
    CHECK(t.packets[0] == Packet{0.0, Direction::Upload});
    CHECK(t.packets[1] == Packet{0.5, Direction::Download});
}

TEST_CASE("parse: malformed field names the line") {
    try {
        parse_trace("0.0\tx");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
    try {
        parse_trace("0.0 1\n\n0.5 0\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_trace("abc 1"), ParseError);
    CHECK_THROWS_AS(parse_trace("0.5"), ParseError);
    CHECK_THROWS_AS(parse_trace("nan 1"), ParseError);
}

TEST_CASE("parse: empty input is an empty trace") {
    CHECK(parse_trace("").empty());
    CHECK(parse_trace("\n\n  \n").empty());
}

TEST_CASE("parse: spaces, CRLF and extra columns") {
    const auto t = parse_trace("1.0 -1 R\r\n1.25   +1\t\tD\r\n");
    REQUIRE(t.size() == 2);
    CHECK(t.packets[0] == Packet{0.0, Direction::Download});
    CHECK(t.packets[1] == Packet{0.25, Direction::Upload});
}

TEST_CASE("parse: out-of-order lines are stably sorted") {
    const auto t = parse_trace("1.0 1\n0.5 -1\n1.0 -1\n");
    REQUIRE(t.size() == 3);
    CHECK(t.packets[0] == Packet{0.0, Direction::Download});
    CHECK(t.packets[1] == Packet{0.5, Direction::Upload});
    CHECK(t.packets[2] == Packet{0.5, Direction::Download});
}

TEST_CASE("write_defended_trace formats") {
    DefendedTrace a;
    a.packets.push_back({0.0, Direction::Upload, PacketKind::Real, 0.0});
    CHECK(to_text(a) == "0.000000\t1\tR\n");
    DefendedTrace b;
    b.packets.push_back({1.0, Direction::Download, PacketKind::Dummy, std::nullopt});
    CHECK(to_text(b) == "1.000000\t-1\tD\n");
}

TEST_CASE("parse_defended_trace rejects bad kind columns") {
    CHECK_THROWS_AS(parse_defended_trace("0.0\t1\tX\n"), ParseError);
    CHECK_THROWS_AS(parse_defended_trace("0.0\t1\n"), ParseError);
    const auto d = parse_defended_trace("0.000000\t1\tR\n1.000000\t-1\tD\n");
    REQUIRE(d.size() == 2);
    CHECK(d.packets[1].kind == PacketKind::Dummy);
    CHECK(d.packets[1].direction == Direction::Download);
}

TEST_CASE("property: write, strip dummies, parse returns the real schedule") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto original = testing::random_trace(rng, 200);
        DefendedTrace d;
        for (const auto& p : original.packets) {
            d.packets.push_back({p.time, p.direction, PacketKind::Real, p.time});
            if (rng.uniform01() < 0.3)
                d.packets.push_back({p.time, Direction::Download, PacketKind::Dummy, std::nullopt});
        }
        auto reread = parse_defended_trace(to_text(d));
        attach_sources(original, reread);
        auto real = real_subset(reread);
        normalize(real);
        REQUIRE(real.size() == original.size());
        for (std::size_t k = 0; k < real.size(); ++k) {
            CHECK(real.packets[k].direction == original.packets[k].direction);
            CHECK(std::abs(real.packets[k].time - original.packets[k].time) < 1e-6);
        }
    }
}

TEST_CASE("attach_sources rejects mismatched counts") {
    const auto original = parse_trace("0 1\n1 -1\n");
    auto d = parse_defended_trace("0.0\t1\tR\n");
    CHECK_THROWS_AS(attach_sources(original, d), DataError);
}

TEST_CASE("label_from_filename") {
    CHECK(label_from_filename("0-0", '-') == "0");
    CHECK(label_from_filename("12-345", '-') == "12");
    CHECK(label_from_filename("site_3", '_') == "site");
    CHECK(label_from_filename("plain", '-') == "plain");
}

TEST_CASE("load_dataset: labels from filenames in sorted order") {
    TempDir dir("load");
    dir.write("1-0", "0 1\n0.1 -1\n");
    dir.write("0-1", "0 1\n0.2 -1\n");
    dir.write("0-0", "0 1\n0.3 -1\n");
    const auto result = load_dataset(dir.path);
    REQUIRE(result.dataset.size() == 3);
    CHECK(result.skipped == 0);
    CHECK(result.dataset.traces[0].label == "0");
    CHECK(result.dataset.traces[1].label == "0");
    CHECK(result.dataset.traces[2].label == "1");
    CHECK(result.dataset.traces[0].name == "0-0");
}

TEST_CASE("load_dataset: malformed file skipped with a warning") {
    TempDir dir("skip");
    dir.write("0-0", "0 1\n");
    dir.write("0-1", "0 x\n");
    dir.write("1-0", "0 -1\n");
    const auto result = load_dataset(dir.path);
    CHECK(result.dataset.size() == 2);
    CHECK(result.skipped == 1);
    CHECK(result.warnings.size() == 1);
}

TEST_CASE("load_dataset: empty or missing directory is an error") {
    TempDir dir("empty");
    CHECK_THROWS_AS(load_dataset(dir.path), DataError);
    CHECK_THROWS_AS(load_dataset(dir.path / "missing"), DataError);
    dir.write("0-0", "bad\n");
    CHECK_THROWS_AS(load_dataset(dir.path), DataError);
}

TEST_CASE("load_dataset result does not depend on jobs") {
    TempDir dir("jobs");
    Rng rng(5);
    for (int i = 0; i < 12; ++i) {
        std::ostringstream text;
        write_trace(text, testing::random_trace(rng, 50));
        dir.write(std::to_string(i % 3) + "-" + std::to_string(i), text.str());
    }
    const auto one = load_dataset(dir.path, {'-', 1});
    const auto four = load_dataset(dir.path, {'-', 4});
    REQUIRE(one.dataset.size() == four.dataset.size());
    for (std::size_t i = 0; i < one.dataset.size(); ++i) {
        CHECK(one.dataset.traces[i].name == four.dataset.traces[i].name);
        CHECK(one.dataset.traces[i].packets == four.dataset.traces[i].packets);
    }
}

TEST_CASE("save_dataset then load_dataset round-trips") {
    TempDir dir("save");
    Dataset ds;
    Rng rng(9);
    for (int i = 0; i < 4; ++i) {
        auto t = testing::random_trace(rng, 40);
        if (t.empty()) t.packets.push_back({0.0, Direction::Upload});
        t.label = std::to_string(i % 2);
        t.name = t.label + "-" + std::to_string(i);
        ds.traces.push_back(t);
    }
    save_dataset(dir.path, ds);
    const auto back = load_dataset(dir.path).dataset;
    REQUIRE(back.size() == 4);
    for (const auto& t : back.traces) {
        const auto it = std::find_if(ds.traces.begin(), ds.traces.end(),
                                     [&](const Trace& o) { return o.name == t.name; });
        REQUIRE(it != ds.traces.end());
        REQUIRE(it->size() == t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
            CHECK(it->packets[k].direction == t.packets[k].direction);
            CHECK(std::abs(it->packets[k].time - t.packets[k].time) < 1e-6);
        }
    }
}
