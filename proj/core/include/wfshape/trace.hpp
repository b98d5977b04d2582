#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfshape {

// Upload is client -> network (+1 on disk), Download is network -> client (-1).
enum class Direction : std::uint8_t { Upload, Download };
enum class PacketKind : std::uint8_t { Real, Dummy };

inline int direction_sign(Direction d) { return d == Direction::Upload ? 1 : -1; }

struct Packet {
    double time = 0.0;
    Direction direction = Direction::Upload;

    friend bool operator==(const Packet&, const Packet&) = default;
};

/// One page load. Packets are time-ordered and the first packet sits at t=0.
struct Trace {
    std::vector<Packet> packets;
    std::string label;
    std::string name;  // file the trace came from, if any

    std::size_t size() const { return packets.size(); }
    bool empty() const { return packets.empty(); }
    double duration() const { return packets.empty() ? 0.0 : packets.back().time; }
    std::size_t count(Direction d) const;
    std::vector<double> times(Direction d) const;
};

struct DefendedPacket {
    double send_time = 0.0;
    Direction direction = Direction::Upload;
    PacketKind kind = PacketKind::Real;
    std::optional<double> source_time;  // present iff kind == Real

    bool is_real() const { return kind == PacketKind::Real; }
    double delay() const { return source_time ? send_time - *source_time : 0.0; }

    friend bool operator==(const DefendedPacket&, const DefendedPacket&) = default;
};

struct DefendedTrace {
    std::vector<DefendedPacket> packets;
    std::uint64_t seed = 0;
    std::uint64_t drawn_budget = 0;

    std::size_t count(PacketKind kind) const;
    std::size_t count(PacketKind kind, Direction d) const;
    std::size_t size() const { return packets.size(); }
};

struct Dataset {
    std::vector<Trace> traces;
    std::string name;

    std::size_t size() const { return traces.size(); }
    bool empty() const { return traces.empty(); }
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Raised for unusable input data (empty datasets, mismatched sets, degenerate traces).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TraceFormat { TimeDirection };

// Each non-empty line is `<time> <direction>` separated by tabs or spaces.
// Only the sign of the direction matters; trailing columns are ignored so
// defended files can be read back from the attacker's point of view.
Trace parse_trace(std::string_view text, TraceFormat format = TraceFormat::TimeDirection);
Trace parse_trace(std::istream& in, TraceFormat format = TraceFormat::TimeDirection);

/// Stable-sorts by time and shifts so the first packet is at t=0.
void normalize(Trace& trace);

std::string format_time(double seconds);

void write_trace(std::ostream& out, const Trace& trace);
void write_defended_trace(std::ostream& out, const DefendedTrace& trace);
std::string to_text(const DefendedTrace& trace);

/// Reads the `time ±1 R|D` format. Source times are not on disk; see attach_sources.
DefendedTrace parse_defended_trace(std::string_view text);

/// Pairs Real packets with the original trace per direction in FIFO order and
/// fills in source_time. Throws DataError if the real counts disagree.
void attach_sources(const Trace& original, DefendedTrace& defended);

/// Drops dummies and returns the real schedule as a plain trace (not normalized).
Trace real_subset(const DefendedTrace& defended);

struct LoadOptions {
    char label_separator = '-';
    unsigned jobs = 1;
};

struct LoadResult {
    Dataset dataset;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

/// Loads every regular file in `root` (lexicographic order). The label is the
/// filename up to the first separator. Unreadable or malformed files are skipped.
LoadResult load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

std::string label_from_filename(std::string_view filename, char separator);

void save_dataset(const std::filesystem::path& root, const Dataset& dataset);

}  // namespace wfshape
