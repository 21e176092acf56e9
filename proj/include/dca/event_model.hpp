#pragma once

// Trace data model and ingestion.
//
// A trace is a line-oriented CSV file with one intercepted call per line:
//
//     ts_ms,process_id,process_name,call_category,call_name,direction,seq
//
// Lines starting with '#' and blank lines are ignored. `direction` is empty
// for file_access and keyboard_state calls. Every intercepted call yields one
// antigen (stamped with its process id) and one signal-relevant event; the two
// logs are merged into a single time-ordered Dataset.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dca {

enum class CallCategory { communication, file_access, keyboard_state };
enum class Direction { outbound, inbound };

std::string_view to_string(CallCategory c);
std::string_view to_string(Direction d);
std::optional<CallCategory> parse_category(std::string_view s);
std::optional<Direction> parse_direction(std::string_view s);

// Category of a monitored API call, or nullopt if the call is not monitored.
std::optional<CallCategory> category_of(std::string_view call_name);

// Natural direction of a communication call (socket/send/sendto are outbound).
std::optional<Direction> natural_direction(std::string_view call_name);

struct EventRecord {
    std::int64_t ts = 0;  // ms since trace start
    std::string process_id;
    std::string process_name;
    CallCategory category = CallCategory::communication;
    std::string call_name;
    std::optional<Direction> direction;
    std::uint64_t seq = 0;

    bool operator==(const EventRecord&) const = default;

    bool is_outbound() const;
    bool is_inbound() const;
};

struct AntigenEvent {
    std::int64_t ts = 0;
    std::string antigen_type;  // process id of the originating call
    std::string call_name;
    std::uint64_t seq = 0;     // source sequence number

    bool operator==(const AntigenEvent&) const = default;
};

AntigenEvent to_antigen(const EventRecord& r);

struct DatasetMeta {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<std::string> sources;

    bool operator==(const DatasetMeta&) const = default;
};

struct DatasetItem {
    std::variant<AntigenEvent, EventRecord> payload;

    std::int64_t ts() const;
    std::uint64_t seq() const;
    bool is_antigen() const { return payload.index() == 0; }
    const AntigenEvent& antigen() const { return std::get<AntigenEvent>(payload); }
    const EventRecord& event() const { return std::get<EventRecord>(payload); }
};

struct Dataset {
    std::vector<DatasetItem> items;
    DatasetMeta meta;

    bool empty() const { return items.empty(); }
    std::vector<EventRecord> events() const;
    std::vector<AntigenEvent> antigen() const;
};

// Throws ValidationError when a record breaks the call taxonomy.
void validate_record(const EventRecord& r, std::size_t line = 0);

EventRecord parse_trace_line(std::string_view line, std::size_t line_no = 0);
std::string format_trace_line(const EventRecord& r);

std::vector<EventRecord> parse_trace(std::istream& in);
std::vector<EventRecord> parse_trace(const std::filesystem::path& path);

void write_trace(std::ostream& out, std::span<const EventRecord> records);
void write_trace(const std::filesystem::path& path, std::span<const EventRecord> records);

// Merges two logs, each sorted by (ts, seq), into one time-ordered dataset.
// Equal timestamps put antigen before signal events, then order by seq.
Dataset merge_sorted(std::span<const AntigenEvent> antigen_log, std::span<const EventRecord> signal_events);

// Sorts records by (ts, seq), derives the antigen log and merges both.
Dataset dataset_from_records(std::vector<EventRecord> records, DatasetMeta meta = {});

nlohmann::json meta_to_json(const DatasetMeta& meta);
DatasetMeta meta_from_json(const nlohmann::json& j);

// Sidecar path for a trace: "<trace>.meta.json".
std::filesystem::path meta_path_for(const std::filesystem::path& trace);

// Writes trace + JSON sidecar.
void write_dataset(const std::filesystem::path& trace, const Dataset& ds);

// Reads a trace and its sidecar (if present) into a Dataset.
Dataset read_dataset(const std::filesystem::path& trace);

} // namespace dca
