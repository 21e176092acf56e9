#include "dca/event_model.hpp"

#include "dca/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

namespace dca {

namespace {

struct CallInfo {
    std::string_view name;
    CallCategory category;
    std::optional<Direction> direction;
};

constexpr std::array<CallInfo, 13> kCalls{{
    {"socket", CallCategory::communication, Direction::outbound},
    {"send", CallCategory::communication, Direction::outbound},
    {"sendto", CallCategory::communication, Direction::outbound},
    {"recv", CallCategory::communication, Direction::inbound},
    {"recvfrom", CallCategory::communication, Direction::inbound},
    {"CreateFile", CallCategory::file_access, std::nullopt},
    {"OpenFile", CallCategory::file_access, std::nullopt},
    {"ReadFile", CallCategory::file_access, std::nullopt},
    {"WriteFile", CallCategory::file_access, std::nullopt},
    {"GetAsyncKeyState", CallCategory::keyboard_state, std::nullopt},
    {"GetKeyboardState", CallCategory::keyboard_state, std::nullopt},
    {"GetKeyNameText", CallCategory::keyboard_state, std::nullopt},
    {"keybd_event", CallCategory::keyboard_state, std::nullopt},
}};

const CallInfo* find_call(std::string_view name) {
    for (const auto& c : kCalls)
        if (c.name == name) return &c;
    return nullptr;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

bool is_skippable(std::string_view line) {
    auto t = trim(line);
    return t.empty() || t.front() == '#';
}

} // namespace

std::string_view to_string(CallCategory c) {
    switch (c) {
    case CallCategory::communication: return "communication";
    case CallCategory::file_access: return "file_access";
    case CallCategory::keyboard_state: return "keyboard_state";
    }
    return "?";
}

std::string_view to_string(Direction d) {
    return d == Direction::outbound ? "outbound" : "inbound";
}

std::optional<CallCategory> parse_category(std::string_view s) {
    if (s == "communication") return CallCategory::communication;
    if (s == "file_access") return CallCategory::file_access;
    if (s == "keyboard_state") return CallCategory::keyboard_state;
    return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "outbound") return Direction::outbound;
    if (s == "inbound") return Direction::inbound;
    return std::nullopt;
}

std::optional<CallCategory> category_of(std::string_view call_name) {
    if (auto* c = find_call(call_name)) return c->category;
    return std::nullopt;
}

std::optional<Direction> natural_direction(std::string_view call_name) {
    if (auto* c = find_call(call_name)) return c->direction;
    return std::nullopt;
}

bool EventRecord::is_outbound() const {
    return category == CallCategory::communication &&
           direction.value_or(natural_direction(call_name).value_or(Direction::inbound)) == Direction::outbound;
}

bool EventRecord::is_inbound() const {
    return category == CallCategory::communication && !is_outbound();
}

AntigenEvent to_antigen(const EventRecord& r) {
    return AntigenEvent{r.ts, r.process_id, r.call_name, r.seq};
}

std::int64_t DatasetItem::ts() const {
    return std::visit([](const auto& p) { return p.ts; }, payload);
}

std::uint64_t DatasetItem::seq() const {
    return std::visit([](const auto& p) { return p.seq; }, payload);
}

std::vector<EventRecord> Dataset::events() const {
    std::vector<EventRecord> out;
    for (const auto& it : items)
        if (!it.is_antigen()) out.push_back(it.event());
    return out;
}

std::vector<AntigenEvent> Dataset::antigen() const {
    std::vector<AntigenEvent> out;
    for (const auto& it : items)
        if (it.is_antigen()) out.push_back(it.antigen());
    return out;
}

void validate_record(const EventRecord& r, std::size_t line) {
    if (r.ts < 0) throw ValidationError("negative timestamp", line);
    if (r.process_id.empty()) throw ValidationError("empty process_id", line);
    const CallInfo* info = find_call(r.call_name);
    if (!info) throw ValidationError("unknown call_name '" + r.call_name + "'", line);
    if (info->category != r.category)
        throw ValidationError("call '" + r.call_name + "' is not a " + std::string(to_string(r.category)) + " call",
                              line);
    if (r.category == CallCategory::communication) {
        if (r.direction && r.direction != info->direction)
            throw ValidationError("direction '" + std::string(to_string(*r.direction)) + "' contradicts call '" +
                                      r.call_name + "'",
                                  line);
    } else if (r.direction) {
        throw ValidationError("direction given for non-communication call '" + r.call_name + "'", line);
    }
}

EventRecord parse_trace_line(std::string_view line, std::size_t line_no) {
    std::array<std::string_view, 7> f;
    std::size_t n = 0, start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (n == f.size()) throw ParseError("expected 7 fields, got more", line_no);
        f[n++] = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (n != f.size()) throw ParseError("expected 7 fields, got " + std::to_string(n), line_no);

    EventRecord r;
    auto ts = parse_int<std::int64_t>(f[0]);
    if (!ts || *ts < 0) throw ParseError("bad timestamp '" + std::string(f[0]) + "'", line_no);
    r.ts = *ts;
    r.process_id = f[1];
    r.process_name = f[2];
    auto cat = parse_category(f[3]);
    if (!cat) throw ParseError("bad call_category '" + std::string(f[3]) + "'", line_no);
    r.category = *cat;
    r.call_name = f[4];
    if (!f[5].empty()) {
        auto dir = parse_direction(f[5]);
        if (!dir) throw ParseError("bad direction '" + std::string(f[5]) + "'", line_no);
        r.direction = dir;
    }
    auto seq = parse_int<std::uint64_t>(f[6]);
    if (!seq) throw ParseError("bad seq '" + std::string(f[6]) + "'", line_no);
    r.seq = *seq;
    if (r.process_id.empty()) throw ParseError("empty process_id", line_no);

    validate_record(r, line_no);
    return r;
}

std::string format_trace_line(const EventRecord& r) {
    std::string s;
    s.reserve(64);
    s += std::to_string(r.ts);
    s += ',';
    s += r.process_id;
    s += ',';
    s += r.process_name;
    s += ',';
    s += to_string(r.category);
    s += ',';
    s += r.call_name;
    s += ',';
    if (r.direction) s += to_string(*r.direction);
    s += ',';
    s += std::to_string(r.seq);
    return s;
}

std::vector<EventRecord> parse_trace(std::istream& in) {
    std::vector<EventRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) continue;
        auto r = parse_trace_line(line, line_no);
        if (!out.empty() && r.seq <= out.back().seq)
            throw ValidationError("seq " + std::to_string(r.seq) + " does not increase", line_no);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<EventRecord> parse_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trace '" + path.string() + "'");
    return parse_trace(in);
}

void write_trace(std::ostream& out, std::span<const EventRecord> records) {
    out << "# ts_ms,process_id,process_name,call_category,call_name,direction,seq\n";
    for (const auto& r : records) out << format_trace_line(r) << '\n';
}

void write_trace(const std::filesystem::path& path, std::span<const EventRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace '" + path.string() + "'");
    write_trace(out, records);
}

Dataset merge_sorted(std::span<const AntigenEvent> antigen_log, std::span<const EventRecord> signal_events) {
    auto check = [](auto span, std::string_view which) {
        for (std::size_t i = 1; i < span.size(); ++i) {
            const auto& a = span[i - 1];
            const auto& b = span[i];
            if (b.ts < a.ts || (b.ts == a.ts && b.seq < a.seq))
                throw PreconditionError(std::string(which) + " not sorted by (ts, seq) at index " + std::to_string(i));
        }
    };
    check(antigen_log, "antigen log");
    check(signal_events, "signal events");

    Dataset ds;
    ds.items.reserve(antigen_log.size() + signal_events.size());
    std::size_t i = 0, j = 0;
    while (i < antigen_log.size() || j < signal_events.size()) {
        const bool take_antigen =
            j == signal_events.size() || (i < antigen_log.size() && antigen_log[i].ts <= signal_events[j].ts);
        if (take_antigen)
            ds.items.push_back({antigen_log[i++]});
        else
            ds.items.push_back({signal_events[j++]});
    }
    return ds;
}

Dataset dataset_from_records(std::vector<EventRecord> records, DatasetMeta meta) {
    std::stable_sort(records.begin(), records.end(), [](const EventRecord& a, const EventRecord& b) {
        return std::pair(a.ts, a.seq) < std::pair(b.ts, b.seq);
    });
    std::vector<AntigenEvent> antigen;
    antigen.reserve(records.size());
    for (const auto& r : records) antigen.push_back(to_antigen(r));
    Dataset ds = merge_sorted(antigen, records);
    ds.meta = std::move(meta);
    return ds;
}

nlohmann::json meta_to_json(const DatasetMeta& meta) {
    return {{"scenario", meta.scenario}, {"seed", meta.seed}, {"sources", meta.sources}};
}

DatasetMeta meta_from_json(const nlohmann::json& j) {
    DatasetMeta m;
    m.scenario = j.value("scenario", std::string{});
    m.seed = j.value("seed", std::uint64_t{0});
    m.sources = j.value("sources", std::vector<std::string>{});
    return m;
}

std::filesystem::path meta_path_for(const std::filesystem::path& trace) {
    return std::filesystem::path(trace.string() + ".meta.json");
}

void write_dataset(const std::filesystem::path& trace, const Dataset& ds) {
    write_trace(trace, ds.events());
    std::ofstream out(meta_path_for(trace), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write meta sidecar for '" + trace.string() + "'");
    out << meta_to_json(ds.meta).dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& trace) {
    DatasetMeta meta;
    const auto mp = meta_path_for(trace);
    if (std::filesystem::exists(mp)) {
        std::ifstream in(mp);
        try {
            meta = meta_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("bad meta sidecar '" + mp.string() + "': " + e.what());
        }
    }
    if (meta.sources.empty()) meta.sources.push_back(trace.filename().string());
    return dataset_from_records(parse_trace(trace), std::move(meta));
}

} // namespace dca
