#pragma once

// Anomaly coefficients per antigen type (process).
//
//   MCAV_x = Z_x / Y_x                       mature share of x's presentations
//   MAC_x  = MCAV_x * Antigen_x / sum Antigen  MCAV weighted by x's antigen share
//
// MAC damps processes that present few antigen, which otherwise score a high
// MCAV on very little evidence.

#include "dca/engine.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dca {

using ScoreMap = std::map<std::string, double>;

enum class Label { normal, anomalous };
std::string_view to_string(Label l);

// Types with no presentations are omitted.
ScoreMap compute_mcav(const PresentationTally& tally);

ScoreMap compute_mac(const ScoreMap& mcav, const std::map<std::string, std::uint64_t>& antigen_counts);

// value > threshold -> anomalous.
std::map<std::string, Label> classify(const ScoreMap& values, double threshold);

struct ProcessScore {
    std::string process_id;
    std::string process_name;
    std::uint64_t antigen_count = 0;  // presented antigen
    std::uint64_t mature_count = 0;
    double mcav = 0.0;
    double mac = 0.0;
    Label label = Label::normal;  // MAC against the report threshold
};

struct AnalysisReport {
    std::string experiment;
    std::string weight_preset;
    double threshold = 0.5;
    std::uint64_t seed = 0;
    std::uint64_t sampled = 0;
    std::uint64_t dropped = 0;
    std::vector<ProcessScore> processes;  // ordered by process_id
    nlohmann::json config;

    const ProcessScore* find_by_name(std::string_view name) const;
};

// Builds a report from engine output; `names` maps process id to name.
AnalysisReport make_report(const EngineResult& result, const std::map<std::string, std::string>& names,
                           double threshold);

std::map<std::string, std::string> process_names(const Dataset& ds);

nlohmann::json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const nlohmann::json& j);

struct ProcessSummary {
    std::string process_id;
    std::string process_name;
    double mean_antigen = 0.0;
    double mean_mcav = 0.0;
    double mean_mac = 0.0;
    std::vector<double> antigen_runs;
    std::vector<double> mcav_runs;
    std::vector<double> mac_runs;
    // Two-sided Mann-Whitney p-values against the suspect process.
    std::optional<double> p_mcav;
    std::optional<double> p_mac;
};

struct AggregateReport {
    std::string experiment;
    std::string weight_preset;
    double threshold = 0.5;
    std::size_t runs = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<ProcessSummary> processes;  // ordered by process_id
    nlohmann::json config;

    const ProcessSummary* find_by_name(std::string_view name) const;
};

// Means are over the runs in which a process presented antigen; the per-run
// vectors keep only those runs. Throws PreconditionError on empty input.
AggregateReport aggregate_runs(std::span<const AnalysisReport> reports);

// Fills p_mcav/p_mac of every process other than `suspect_name` by comparing
// its per-run values with the suspect's. No-op when the suspect is absent.
void attach_significance(AggregateReport& agg, std::string_view suspect_name);

nlohmann::json to_json(const AggregateReport& r);
AggregateReport aggregate_from_json(const nlohmann::json& j);

// Flat table: experiment,process,output_antigen,mean_mcav,mean_mac,p_mcav,p_mac
void write_table_csv(std::ostream& out, std::span<const AggregateReport> aggs, bool header = true);

// Plain-text summary with labels at `threshold`.
void write_summary(std::ostream& out, const AggregateReport& agg, double threshold);

std::string format_number(double v);

} // namespace dca
