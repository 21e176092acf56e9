#pragma once

// Repeated runs and weight sweeps.
//
// Run r of an experiment uses seed base_seed + r. A scenario source is
// regenerated with that seed before each run; a trace source is reused and
// only the cell population is reseeded.

#include "dca/analysis.hpp"
#include "dca/config.hpp"
#include "dca/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dca {

struct ExperimentSource {
    std::string label;
    std::optional<ScenarioConfig> scenario;
    std::optional<Dataset> dataset;

    static ExperimentSource from_scenario(const std::string& preset_id, const RunConfig& cfg);
    static ExperimentSource from_dataset(Dataset ds, std::string label);

    Dataset dataset_for_seed(std::uint64_t seed) const;
};

AnalysisReport run_once(const Dataset& ds, const RunConfig& cfg, const WeightMatrix& w, std::uint64_t seed,
                        const std::string& label);

std::vector<AnalysisReport> run_repetitions(const ExperimentSource& src, const RunConfig& cfg, const WeightMatrix& w);

// Aggregate over cfg.reps runs with Mann-Whitney p-values against cfg.suspect.
AggregateReport run_experiment(const ExperimentSource& src, const RunConfig& cfg, const WeightMatrix& w,
                               std::vector<AnalysisReport>* per_run = nullptr);

struct PairedTest {
    std::string metric;  // "mcav" or "mac"
    std::string preset_a;
    std::string preset_b;
    std::size_t pairs = 0;
    std::optional<double> statistic;
    std::optional<double> p_value;  // unset when there are too few runs
};

struct SweepResult {
    std::vector<std::string> experiments;
    std::vector<std::string> presets;
    // reports[e][k][r]: experiment e, preset k, run r
    std::vector<std::vector<std::vector<AnalysisReport>>> reports;
    std::vector<std::vector<AggregateReport>> aggregates;
    std::vector<PairedTest> tests;
    std::string suspect;

    // Mean suspect value per experiment and preset; NaN when the suspect never presented.
    double mean_suspect(std::size_t e, std::size_t k, bool mac) const;
};

// Runs every preset WS1..WS5 on every source; Wilcoxon signed-rank tests for
// each preset pair pool the suspect's per-run values over all sources.
SweepResult run_sweep(const std::vector<ExperimentSource>& sources, const RunConfig& cfg);

// Rows = experiments, columns = WS1..WS5.
void write_sweep_table(std::ostream& out, const SweepResult& s, bool mac);
void write_sweep_tests(std::ostream& out, const SweepResult& s);
nlohmann::json to_json(const SweepResult& s);

} // namespace dca
