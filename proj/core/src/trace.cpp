#include "wfshape/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "wfshape/parallel.hpp"

namespace wfshape {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

bool parse_double(std::string_view field, double& out) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    if (field.empty()) return false;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

template <typename LineFn>
void for_each_line(std::string_view text, LineFn&& fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        fn(line_no, line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
}

Direction parse_direction(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    if (!parse_double(field, value))
        throw ParseError(line_no, "direction is not a number: '" + std::string(field) + "'");
    if (value == 0.0) throw ParseError(line_no, "direction must be non-zero");
    return value > 0 ? Direction::Upload : Direction::Download;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::size_t Trace::count(Direction d) const {
    return static_cast<std::size_t>(std::count_if(
        packets.begin(), packets.end(), [d](const Packet& p) { return p.direction == d; }));
}

std::vector<double> Trace::times(Direction d) const {
    std::vector<double> out;
    for (const auto& p : packets)
        if (p.direction == d) out.push_back(p.time);
    return out;
}

std::size_t DefendedTrace::count(PacketKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        packets.begin(), packets.end(), [kind](const DefendedPacket& p) { return p.kind == kind; }));
}

std::size_t DefendedTrace::count(PacketKind kind, Direction d) const {
    return static_cast<std::size_t>(
        std::count_if(packets.begin(), packets.end(), [kind, d](const DefendedPacket& p) {
            return p.kind == kind && p.direction == d;
        }));
}

Trace parse_trace(std::string_view text, TraceFormat /*format*/) {
    Trace trace;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto fields = split_fields(line);
        if (fields.empty()) return;
        if (fields.size() < 2) throw ParseError(line_no, "expected '<time> <direction>'");
        double t = 0.0;
        if (!parse_double(fields[0], t))
            throw ParseError(line_no, "time is not a number: '" + std::string(fields[0]) + "'");
        trace.packets.push_back({t, parse_direction(fields[1], line_no)});
    });
    normalize(trace);
    return trace;
}

Trace parse_trace(std::istream& in, TraceFormat format) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_trace(std::string_view(text), format);
}

void normalize(Trace& trace) {
    auto& p = trace.packets;
    std::stable_sort(p.begin(), p.end(),
                     [](const Packet& a, const Packet& b) { return a.time < b.time; });
    if (p.empty()) return;
    const double origin = p.front().time;
    for (auto& packet : p) packet.time -= origin;
}

std::string format_time(double seconds) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", seconds);
    return buf;
}

void write_trace(std::ostream& out, const Trace& trace) {
    for (const auto& p : trace.packets)
        out << format_time(p.time) << '\t' << direction_sign(p.direction) << '\n';
}

void write_defended_trace(std::ostream& out, const DefendedTrace& trace) {
    for (const auto& p : trace.packets) {
        out << format_time(p.send_time) << '\t' << direction_sign(p.direction) << '\t'
            << (p.is_real() ? 'R' : 'D') << '\n';
    }
}

std::string to_text(const DefendedTrace& trace) {
    std::ostringstream out;
    write_defended_trace(out, trace);
    return out.str();
}

DefendedTrace parse_defended_trace(std::string_view text) {
    DefendedTrace trace;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto fields = split_fields(line);
        if (fields.empty()) return;
        if (fields.size() != 3) throw ParseError(line_no, "expected '<time> <±1> <R|D>'");
        DefendedPacket p;
        if (!parse_double(fields[0], p.send_time))
            throw ParseError(line_no, "time is not a number: '" + std::string(fields[0]) + "'");
        p.direction = parse_direction(fields[1], line_no);
        if (fields[2] == "R") {
            p.kind = PacketKind::Real;
        } else if (fields[2] == "D") {
            p.kind = PacketKind::Dummy;
        } else {
            throw ParseError(line_no, "kind must be R or D");
        }
        trace.packets.push_back(p);
    });
    return trace;
}

void attach_sources(const Trace& original, DefendedTrace& defended) {
    for (Direction d : {Direction::Upload, Direction::Download}) {
        const auto times = original.times(d);
        std::size_t next = 0;
        for (auto& p : defended.packets) {
            if (p.direction != d || !p.is_real()) continue;
            if (next == times.size())
                throw DataError("defended trace has more real packets than the original");
            p.source_time = times[next++];
        }
        if (next != times.size())
            throw DataError("defended trace is missing real packets of the original");
    }
}

Trace real_subset(const DefendedTrace& defended) {
    Trace out;
    for (const auto& p : defended.packets)
        if (p.is_real()) out.packets.push_back({p.send_time, p.direction});
    return out;
}

std::string label_from_filename(std::string_view filename, char separator) {
    auto pos = filename.find(separator);
    return std::string(filename.substr(0, pos));
}

LoadResult load_dataset(const std::filesystem::path& root, const LoadOptions& options) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw DataError("not a directory: " + root.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    if (ec) throw DataError("cannot list " + root.string() + ": " + ec.message());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<std::optional<Trace>> parsed(files.size());
    std::vector<std::string> errors(files.size());
    parallel_for(files.size(), options.jobs, [&](std::size_t i) {
        std::ifstream in(files[i], std::ios::binary);
        if (!in) {
            errors[i] = files[i].filename().string() + ": cannot open";
            return;
        }
        try {
            Trace t = parse_trace(in);
            t.name = files[i].filename().string();
            t.label = label_from_filename(t.name, options.label_separator);
            parsed[i] = std::move(t);
        } catch (const ParseError& e) {
            errors[i] = files[i].filename().string() + ": " + e.what();
        }
    });

    LoadResult result;
    result.dataset.name = root.filename().string();
    if (result.dataset.name.empty()) result.dataset.name = root.parent_path().filename().string();
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (parsed[i]) {
            result.dataset.traces.push_back(std::move(*parsed[i]));
        } else {
            ++result.skipped;
            result.warnings.push_back(errors[i]);
        }
    }
    if (result.dataset.traces.empty())
        throw DataError("no readable trace files in " + root.string());
    return result;
}

void save_dataset(const std::filesystem::path& root, const Dataset& dataset) {
    std::filesystem::create_directories(root);
    for (std::size_t i = 0; i < dataset.traces.size(); ++i) {
        const auto& t = dataset.traces[i];
        std::string name = t.name.empty() ? t.label + "-" + std::to_string(i) : t.name;
        std::ofstream out(root / name, std::ios::binary);
        if (!out) throw DataError("cannot write " + (root / name).string());
        write_trace(out, t);
    }
}

}  // namespace wfshape
