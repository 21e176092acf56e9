#include "dca/analysis.hpp"

#include "dca/errors.hpp"
#include "dca/stats.hpp"

#include <cstdio>
#include <ostream>

namespace dca {

std::string_view to_string(Label l) { return l == Label::anomalous ? "anomalous" : "normal"; }

ScoreMap compute_mcav(const PresentationTally& tally) {
    ScoreMap out;
    for (const auto& [type, e] : tally) {
        if (e.mature > e.total) throw PreconditionError("tally for '" + type + "' has Z > Y");
        if (e.total == 0) continue;
        out[type] = static_cast<double>(e.mature) / static_cast<double>(e.total);
    }
    return out;
}

ScoreMap compute_mac(const ScoreMap& mcav, const std::map<std::string, std::uint64_t>& antigen_counts) {
    ScoreMap out;
    if (mcav.empty()) return out;
    if (mcav.size() != antigen_counts.size()) throw PreconditionError("compute_mac: key sets differ");
    std::uint64_t total = 0;
    for (const auto& [type, n] : antigen_counts) {
        if (!mcav.count(type)) throw PreconditionError("compute_mac: no MCAV for '" + type + "'");
        if (n == 0) throw PreconditionError("compute_mac: zero antigen count for '" + type + "'");
        total += n;
    }
    for (const auto& [type, v] : mcav)
        out[type] = v * static_cast<double>(antigen_counts.at(type)) / static_cast<double>(total);
    return out;
}

std::map<std::string, Label> classify(const ScoreMap& values, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw PreconditionError("classification threshold must be in (0,1)");
    std::map<std::string, Label> out;
    for (const auto& [k, v] : values) out[k] = v > threshold ? Label::anomalous : Label::normal;
    return out;
}

const ProcessScore* AnalysisReport::find_by_name(std::string_view name) const {
    for (const auto& p : processes)
        if (p.process_name == name) return &p;
    return nullptr;
}

const ProcessSummary* AggregateReport::find_by_name(std::string_view name) const {
    for (const auto& p : processes)
        if (p.process_name == name) return &p;
    return nullptr;
}

std::map<std::string, std::string> process_names(const Dataset& ds) {
    std::map<std::string, std::string> names;
    for (const auto& it : ds.items)
        if (!it.is_antigen()) names.emplace(it.event().process_id, it.event().process_name);
    return names;
}

AnalysisReport make_report(const EngineResult& result, const std::map<std::string, std::string>& names,
                           double threshold) {
    AnalysisReport r;
    r.threshold = threshold;
    r.sampled = result.sampled;
    r.dropped = result.dropped;

    const ScoreMap mcav = compute_mcav(result.tally);
    std::map<std::string, std::uint64_t> counts;
    for (const auto& [type, e] : result.tally)
        if (e.total > 0) counts[type] = e.total;
    const ScoreMap mac = compute_mac(mcav, counts);
    const auto labels = classify(mac, threshold);

    for (const auto& [type, v] : mcav) {
        ProcessScore p;
        p.process_id = type;
        auto it = names.find(type);
        p.process_name = it != names.end() ? it->second : type;
        p.antigen_count = counts.at(type);
        p.mature_count = result.tally.at(type).mature;
        p.mcav = v;
        p.mac = mac.at(type);
        p.label = labels.at(type);
        r.processes.push_back(std::move(p));
    }
    return r;
}

nlohmann::json to_json(const AnalysisReport& r) {
    nlohmann::json procs = nlohmann::json::array();
    for (const auto& p : r.processes)
        procs.push_back({{"process_id", p.process_id},
                         {"process", p.process_name},
                         {"antigen", p.antigen_count},
                         {"mature", p.mature_count},
                         {"mcav", p.mcav},
                         {"mac", p.mac},
                         {"label", to_string(p.label)}});
    return {{"experiment", r.experiment}, {"weights", r.weight_preset}, {"threshold", r.threshold},
            {"seed", r.seed},             {"sampled", r.sampled},       {"dropped", r.dropped},
            {"processes", procs},         {"config", r.config}};
}

AnalysisReport report_from_json(const nlohmann::json& j) {
    AnalysisReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.weight_preset = j.at("weights").get<std::string>();
    r.threshold = j.at("threshold").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.sampled = j.at("sampled").get<std::uint64_t>();
    r.dropped = j.at("dropped").get<std::uint64_t>();
    r.config = j.value("config", nlohmann::json::object());
    for (const auto& p : j.at("processes")) {
        ProcessScore s;
        s.process_id = p.at("process_id").get<std::string>();
        s.process_name = p.at("process").get<std::string>();
        s.antigen_count = p.at("antigen").get<std::uint64_t>();
        s.mature_count = p.at("mature").get<std::uint64_t>();
        s.mcav = p.at("mcav").get<double>();
        s.mac = p.at("mac").get<double>();
        s.label = p.at("label").get<std::string>() == "anomalous" ? Label::anomalous : Label::normal;
        r.processes.push_back(std::move(s));
    }
    return r;
}

AggregateReport aggregate_runs(std::span<const AnalysisReport> reports) {
    if (reports.empty()) throw PreconditionError("aggregate_runs: no reports");
    AggregateReport agg;
    agg.experiment = reports.front().experiment;
    agg.weight_preset = reports.front().weight_preset;
    agg.threshold = reports.front().threshold;
    agg.config = reports.front().config;
    agg.runs = reports.size();

    std::map<std::string, ProcessSummary> by_id;
    for (const auto& r : reports) {
        agg.seeds.push_back(r.seed);
        for (const auto& p : r.processes) {
            auto& s = by_id[p.process_id];
            s.process_id = p.process_id;
            s.process_name = p.process_name;
            s.antigen_runs.push_back(static_cast<double>(p.antigen_count));
            s.mcav_runs.push_back(p.mcav);
            s.mac_runs.push_back(p.mac);
        }
    }
    auto mean = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
    };
    for (auto& [id, s] : by_id) {
        s.mean_antigen = mean(s.antigen_runs);
        s.mean_mcav = mean(s.mcav_runs);
        s.mean_mac = mean(s.mac_runs);
        agg.processes.push_back(std::move(s));
    }
    return agg;
}

void attach_significance(AggregateReport& agg, std::string_view suspect_name) {
    const ProcessSummary* suspect = agg.find_by_name(suspect_name);
    if (!suspect) return;
    const auto sus_mcav = suspect->mcav_runs;
    const auto sus_mac = suspect->mac_runs;
    for (auto& p : agg.processes) {
        if (p.process_name == suspect_name) continue;
        p.p_mcav = stats::mann_whitney_u(sus_mcav, p.mcav_runs).p_value;
        p.p_mac = stats::mann_whitney_u(sus_mac, p.mac_runs).p_value;
    }
}

nlohmann::json to_json(const AggregateReport& r) {
    nlohmann::json procs = nlohmann::json::array();
    for (const auto& p : r.processes) {
        nlohmann::json j = {{"process_id", p.process_id},     {"process", p.process_name},
                            {"mean_antigen", p.mean_antigen}, {"mean_mcav", p.mean_mcav},
                            {"mean_mac", p.mean_mac},         {"antigen_runs", p.antigen_runs},
                            {"mcav_runs", p.mcav_runs},       {"mac_runs", p.mac_runs}};
        j["p_mcav"] = p.p_mcav ? nlohmann::json(*p.p_mcav) : nlohmann::json(nullptr);
        j["p_mac"] = p.p_mac ? nlohmann::json(*p.p_mac) : nlohmann::json(nullptr);
        procs.push_back(std::move(j));
    }
    return {{"experiment", r.experiment}, {"weights", r.weight_preset}, {"threshold", r.threshold},
            {"runs", r.runs},             {"seeds", r.seeds},           {"processes", procs},
            {"config", r.config}};
}

AggregateReport aggregate_from_json(const nlohmann::json& j) {
    AggregateReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.weight_preset = j.at("weights").get<std::string>();
    r.threshold = j.at("threshold").get<double>();
    r.runs = j.at("runs").get<std::size_t>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    r.config = j.value("config", nlohmann::json::object());
    for (const auto& p : j.at("processes")) {
        ProcessSummary s;
        s.process_id = p.at("process_id").get<std::string>();
        s.process_name = p.at("process").get<std::string>();
        s.mean_antigen = p.at("mean_antigen").get<double>();
        s.mean_mcav = p.at("mean_mcav").get<double>();
        s.mean_mac = p.at("mean_mac").get<double>();
        s.antigen_runs = p.at("antigen_runs").get<std::vector<double>>();
        s.mcav_runs = p.at("mcav_runs").get<std::vector<double>>();
        s.mac_runs = p.at("mac_runs").get<std::vector<double>>();
        if (!p.at("p_mcav").is_null()) s.p_mcav = p.at("p_mcav").get<double>();
        if (!p.at("p_mac").is_null()) s.p_mac = p.at("p_mac").get<double>();
        r.processes.push_back(std::move(s));
    }
    return r;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void write_table_csv(std::ostream& out, std::span<const AggregateReport> aggs, bool header) {
    if (header) out << "experiment,process,output_antigen,mean_mcav,mean_mac,p_mcav,p_mac\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& a : aggs)
        for (const auto& p : a.processes) {
            char antigen[64];
            std::snprintf(antigen, sizeof antigen, "%.1f", p.mean_antigen);
            out << a.experiment << ',' << p.process_name << ',' << antigen << ',' << format_number(p.mean_mcav)
                << ',' << format_number(p.mean_mac) << ',' << opt(p.p_mcav) << ',' << opt(p.p_mac) << '\n';
        }
}

void write_summary(std::ostream& out, const AggregateReport& agg, double threshold) {
    char line[256];
    out << "experiment " << agg.experiment << "  weights " << agg.weight_preset << "  runs " << agg.runs
        << "  threshold " << format_number(threshold) << " (MAC)\n";
    std::snprintf(line, sizeof line, "%-10s %10s %8s %8s %8s %8s  %s\n", "process", "antigen", "MCAV", "MAC", "p_MCAV",
                  "p_MAC", "label");
    out << line;
    for (const auto& p : agg.processes) {
        auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("-"); };
        std::snprintf(line, sizeof line, "%-10s %10.1f %8.4f %8.4f %8s %8s  %s\n", p.process_name.c_str(),
                      p.mean_antigen, p.mean_mcav, p.mean_mac, opt(p.p_mcav).c_str(), opt(p.p_mac).c_str(),
                      std::string(to_string(p.mean_mac > threshold ? Label::anomalous : Label::normal)).c_str());
        out << line;
    }
}

} // namespace dca
