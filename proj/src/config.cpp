#include "dca/config.hpp"

#include "dca/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include <nlohmann/json.hpp>

namespace dca {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
    return out;
}

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        if (kv.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
        kv.emplace(std::move(key), std::move(value));
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    try {
        return parse_key_values(in);
    } catch (const ParseError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void RunConfig::validate() const {
    norm.validate();
    pop.validate();
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must be in (0,1)");
}

void RunConfig::apply(const KeyValues& kv) {
    for (const auto& [k, v] : kv) {
        if (k == "n_p") norm.n_p = to_double(k, v);
        else if (k == "n_d") norm.n_d = to_double(k, v);
        else if (k == "n_s1") norm.n_s1 = to_double(k, v);
        else if (k == "n_s2") norm.n_s2 = to_double(k, v);
        else if (k == "window_ms") norm.window_ms = static_cast<std::int64_t>(to_uint(k, v));
        else if (k == "population_size") pop.population_size = to_uint(k, v);
        else if (k == "threshold_lo") pop.threshold_lo = to_double(k, v);
        else if (k == "threshold_hi") pop.threshold_hi = to_double(k, v);
        else if (k == "store_capacity") pop.store_capacity = to_uint(k, v);
        else if (k == "antigen_per_cell_per_step") pop.antigen_per_cell_per_step = to_uint(k, v);
        else if (k == "weights") weights = v;
        else if (k == "reps") reps = to_uint(k, v);
        else if (k == "seed") seed = to_uint(k, v);
        else if (k == "threshold") threshold = to_double(k, v);
        else if (k == "suspect") suspect = v;
        else if (k.rfind("scenario.", 0) == 0) scenario.set(k.substr(9), to_double(k, v));
        else throw ConfigError("unknown config key '" + k + "'");
    }
}

KeyValues RunConfig::to_key_values() const {
    KeyValues kv{
        {"n_p", num(norm.n_p)},
        {"n_d", num(norm.n_d)},
        {"n_s1", num(norm.n_s1)},
        {"n_s2", num(norm.n_s2)},
        {"window_ms", std::to_string(norm.window_ms)},
        {"population_size", std::to_string(pop.population_size)},
        {"threshold_lo", num(pop.threshold_lo)},
        {"threshold_hi", num(pop.threshold_hi)},
        {"store_capacity", std::to_string(pop.store_capacity)},
        {"antigen_per_cell_per_step", std::to_string(pop.antigen_per_cell_per_step)},
        {"weights", weights},
        {"reps", std::to_string(reps)},
        {"seed", std::to_string(seed)},
        {"threshold", num(threshold)},
        {"suspect", suspect},
    };
    for (const auto& [k, v] : scenario.values) kv["scenario." + k] = num(v);
    return kv;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : to_key_values()) j[k] = v;
    return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    RunConfig cfg;
    cfg.apply(read_key_values(path));
    cfg.validate();
    return cfg;
}

} // namespace dca
