#include "dca/experiment.hpp"

#include "dca/errors.hpp"
#include "dca/stats.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace dca {

ExperimentSource ExperimentSource::from_scenario(const std::string& preset_id, const RunConfig& cfg) {
    ExperimentSource s;
    ScenarioConfig sc = scenario_preset(preset_id);
    cfg.scenario.apply(sc);
    sc.validate();
    s.label = sc.label;
    s.scenario = std::move(sc);
    return s;
}

ExperimentSource ExperimentSource::from_dataset(Dataset ds, std::string label) {
    ExperimentSource s;
    s.label = std::move(label);
    s.dataset = std::move(ds);
    return s;
}

Dataset ExperimentSource::dataset_for_seed(std::uint64_t seed) const {
    if (scenario) {
        ScenarioConfig sc = *scenario;
        sc.seed = seed;
        return generate(sc);
    }
    if (dataset) return *dataset;
    throw PreconditionError("experiment source has neither a scenario nor a dataset");
}

AnalysisReport run_once(const Dataset& ds, const RunConfig& cfg, const WeightMatrix& w, std::uint64_t seed,
                        const std::string& label) {
    PopulationConfig pop = cfg.pop;
    pop.rng_seed = seed;
    const EngineResult res = run_engine(ds, cfg.norm, pop, w);
    AnalysisReport r = make_report(res, process_names(ds), cfg.threshold);
    r.experiment = label;
    r.weight_preset = w.preset_name;
    r.seed = seed;
    r.config = cfg.to_json();
    r.config["weights"] = w.preset_name;
    return r;
}

std::vector<AnalysisReport> run_repetitions(const ExperimentSource& src, const RunConfig& cfg, const WeightMatrix& w) {
    cfg.validate();
    std::vector<AnalysisReport> out;
    out.reserve(cfg.reps);
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        const std::uint64_t seed = cfg.seed + r;
        out.push_back(run_once(src.dataset_for_seed(seed), cfg, w, seed, src.label));
    }
    return out;
}

AggregateReport run_experiment(const ExperimentSource& src, const RunConfig& cfg, const WeightMatrix& w,
                               std::vector<AnalysisReport>* per_run) {
    auto reports = run_repetitions(src, cfg, w);
    AggregateReport agg = aggregate_runs(reports);
    if (cfg.reps >= 2) attach_significance(agg, cfg.suspect);
    if (per_run) *per_run = std::move(reports);
    return agg;
}

double SweepResult::mean_suspect(std::size_t e, std::size_t k, bool mac) const {
    const ProcessSummary* p = aggregates[e][k].find_by_name(suspect);
    if (!p) return std::numeric_limits<double>::quiet_NaN();
    return mac ? p->mean_mac : p->mean_mcav;
}

SweepResult run_sweep(const std::vector<ExperimentSource>& sources, const RunConfig& cfg) {
    cfg.validate();
    SweepResult s;
    s.presets = weight_preset_names();
    s.suspect = cfg.suspect;
    for (const auto& src : sources) {
        s.experiments.push_back(src.label);
        auto& per_preset = s.reports.emplace_back();
        auto& aggs = s.aggregates.emplace_back();
        // Datasets depend only on the seed, so generate once per run and reuse across presets.
        std::vector<Dataset> datasets;
        for (std::size_t r = 0; r < cfg.reps; ++r) datasets.push_back(src.dataset_for_seed(cfg.seed + r));
        for (const auto& name : s.presets) {
            const WeightMatrix w = weight_preset(name);
            auto& runs = per_preset.emplace_back();
            for (std::size_t r = 0; r < cfg.reps; ++r) runs.push_back(run_once(datasets[r], cfg, w, cfg.seed + r, src.label));
            AggregateReport agg = aggregate_runs(runs);
            if (cfg.reps >= 2) attach_significance(agg, cfg.suspect);
            aggs.push_back(std::move(agg));
        }
    }

    for (const bool mac : {false, true}) {
        for (std::size_t a = 0; a < s.presets.size(); ++a)
            for (std::size_t b = a + 1; b < s.presets.size(); ++b) {
                PairedTest t;
                t.metric = mac ? "mac" : "mcav";
                t.preset_a = s.presets[a];
                t.preset_b = s.presets[b];
                std::vector<double> diffs;
                for (std::size_t e = 0; e < s.experiments.size(); ++e)
                    for (std::size_t r = 0; r < cfg.reps; ++r) {
                        const ProcessScore* pa = s.reports[e][a][r].find_by_name(cfg.suspect);
                        const ProcessScore* pb = s.reports[e][b][r].find_by_name(cfg.suspect);
                        if (!pa || !pb) continue;
                        diffs.push_back(mac ? pa->mac - pb->mac : pa->mcav - pb->mcav);
                    }
                t.pairs = diffs.size();
                if (cfg.reps >= 2 && !diffs.empty()) {
                    const auto res = stats::wilcoxon_signed_rank(diffs);
                    t.statistic = res.statistic;
                    t.p_value = res.p_value;
                }
                s.tests.push_back(std::move(t));
            }
    }
    return s;
}

void write_sweep_table(std::ostream& out, const SweepResult& s, bool mac) {
    out << "experiment";
    for (const auto& p : s.presets) out << ',' << p;
    out << '\n';
    for (std::size_t e = 0; e < s.experiments.size(); ++e) {
        out << s.experiments[e];
        for (std::size_t k = 0; k < s.presets.size(); ++k) {
            const double v = s.mean_suspect(e, k, mac);
            out << ',' << (std::isnan(v) ? std::string() : format_number(v));
        }
        out << '\n';
    }
}

void write_sweep_tests(std::ostream& out, const SweepResult& s) {
    out << "metric,preset_a,preset_b,pairs,W,p\n";
    for (const auto& t : s.tests) {
        out << t.metric << ',' << t.preset_a << ',' << t.preset_b << ',' << t.pairs << ','
            << (t.statistic ? format_number(*t.statistic) : std::string("NA")) << ','
            << (t.p_value ? format_number(*t.p_value) : std::string("NA")) << '\n';
    }
}

nlohmann::json to_json(const SweepResult& s) {
    nlohmann::json j;
    j["experiments"] = s.experiments;
    j["presets"] = s.presets;
    j["suspect"] = s.suspect;
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t e = 0; e < s.experiments.size(); ++e)
        for (std::size_t k = 0; k < s.presets.size(); ++k) cells.push_back(to_json(s.aggregates[e][k]));
    j["aggregates"] = std::move(cells);
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : s.tests)
        tests.push_back({{"metric", t.metric},
                         {"preset_a", t.preset_a},
                         {"preset_b", t.preset_b},
                         {"pairs", t.pairs},
                         {"W", t.statistic ? nlohmann::json(*t.statistic) : nlohmann::json(nullptr)},
                         {"p", t.p_value ? nlohmann::json(*t.p_value) : nlohmann::json(nullptr)}});
    j["wilcoxon"] = std::move(tests);
    return j;
}

} // namespace dca
