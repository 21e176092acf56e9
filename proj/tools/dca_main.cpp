// dca: generate host traces, run the dendritic cell detector, sweep weight
// sets and summarise results.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include "dca/config.hpp"
#include "dca/errors.hpp"
#include "dca/experiment.hpp"

#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string config;
    std::vector<std::string> scenarios;
    std::vector<std::string> traces;
    std::string weights;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::string out = ".";
    std::string in;
    double duration = 0.0;
    bool presentations = false;
};

// Stage-tagged failure for messages like "parse: line 3: ...".
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what, int code)
        : std::runtime_error(stage + ": " + what), code(code) {}
    int code;
};

bool given(const CLI::App& sub, const std::string& name) {
    const CLI::Option* opt = sub.get_option_no_throw(name);
    return opt && opt->count() > 0;
}

dca::RunConfig build_config(const Options& o, const CLI::App& sub) {
    dca::RunConfig cfg;
    try {
        if (!o.config.empty()) cfg.apply(dca::read_key_values(o.config));
        if (given(sub, "--weights")) cfg.weights = o.weights;
        if (given(sub, "--reps")) cfg.reps = o.reps;
        if (given(sub, "--seed")) cfg.seed = o.seed;
        if (given(sub, "--threshold")) cfg.threshold = o.threshold;
        if (given(sub, "--duration")) cfg.scenario.set("duration", o.duration);
        cfg.validate();
    } catch (const std::exception& e) {
        throw StageError("config", e.what(), kExitUsage);
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StageError("output", "cannot write '" + path.string() + "'", kExitRuntime);
    out << content;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StageError("output", "cannot create '" + dir.string() + "': " + ec.message(), kExitRuntime);
}

std::vector<dca::ExperimentSource> load_sources(const Options& o, const dca::RunConfig& cfg) {
    if (o.scenarios.empty() == o.traces.empty())
        throw StageError("usage", "give either --scenario or --trace", kExitUsage);
    std::vector<dca::ExperimentSource> out;
    for (const auto& s : o.scenarios) {
        try {
            out.push_back(dca::ExperimentSource::from_scenario(s, cfg));
        } catch (const dca::ConfigError& e) {
            throw StageError("scenario", e.what(), kExitUsage);
        }
    }
    for (const auto& t : o.traces) {
        try {
            dca::Dataset ds = dca::read_dataset(t);
            std::string label = ds.meta.scenario.empty() ? fs::path(t).stem().string() : ds.meta.scenario;
            out.push_back(dca::ExperimentSource::from_dataset(std::move(ds), std::move(label)));
        } catch (const dca::ParseError& e) {
            throw StageError("parse", std::string(t) + ": " + e.what(), kExitRuntime);
        } catch (const dca::ValidationError& e) {
            throw StageError("validate", std::string(t) + ": " + e.what(), kExitRuntime);
        } catch (const dca::PreconditionError& e) {
            throw StageError("merge", std::string(t) + ": " + e.what(), kExitRuntime);
        }
    }
    return out;
}

dca::WeightMatrix load_weights(const dca::RunConfig& cfg) {
    try {
        return dca::resolve_weights(cfg.weights);
    } catch (const dca::ConfigError& e) {
        throw StageError("config", e.what(), kExitUsage);
    }
}

int cmd_gen(const Options& o, const CLI::App& sub) {
    const dca::RunConfig cfg = build_config(o, sub);
    dca::ScenarioConfig sc;
    try {
        sc = dca::scenario_preset(o.scenarios.front());
        cfg.scenario.apply(sc);
        sc.seed = cfg.seed;
        sc.validate();
    } catch (const dca::ConfigError& e) {
        throw StageError("scenario", e.what(), kExitUsage);
    }
    const dca::Dataset ds = dca::generate(sc);
    ensure_dir(o.out);
    const fs::path path = fs::path(o.out) / (sc.label + "_seed" + std::to_string(sc.seed) + ".csv");
    dca::write_dataset(path, ds);
    std::cout << path.string() << "\n";
    return 0;
}

int cmd_run(const Options& o, const CLI::App& sub) {
    const dca::RunConfig cfg = build_config(o, sub);
    auto sources = load_sources(o, cfg);
    if (sources.size() != 1) throw StageError("usage", "run takes one --scenario or --trace", kExitUsage);
    const dca::WeightMatrix w = load_weights(cfg);
    const auto& src = sources.front();

    ensure_dir(o.out);
    std::vector<dca::AnalysisReport> runs;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        const std::uint64_t seed = cfg.seed + r;
        const dca::Dataset ds = src.dataset_for_seed(seed);
        runs.push_back(dca::run_once(ds, cfg, w, seed, src.label));
        write_file(fs::path(o.out) / ("run_" + std::to_string(r) + ".json"), dump(dca::to_json(runs.back())));
        if (o.presentations) {
            dca::PopulationConfig pop = cfg.pop;
            pop.rng_seed = seed;
            const auto res = dca::run_engine(ds, cfg.norm, pop, w);
            std::ostringstream csv;
            dca::write_presentations_csv(csv, res.presentations);
            write_file(fs::path(o.out) / ("presentations_" + std::to_string(r) + ".csv"), csv.str());
        }
    }
    dca::AggregateReport agg = dca::aggregate_runs(runs);
    if (cfg.reps >= 2) dca::attach_significance(agg, cfg.suspect);

    write_file(fs::path(o.out) / "aggregate.json", dump(dca::to_json(agg)));
    std::ostringstream table, summary;
    dca::write_table_csv(table, std::span(&agg, 1));
    dca::write_summary(summary, agg, cfg.threshold);
    write_file(fs::path(o.out) / "table.csv", table.str());
    write_file(fs::path(o.out) / "summary.txt", summary.str());
    std::cout << summary.str();
    return 0;
}

int cmd_sweep(const Options& o, const CLI::App& sub) {
    const dca::RunConfig cfg = build_config(o, sub);
    const auto sources = load_sources(o, cfg);
    const dca::SweepResult s = dca::run_sweep(sources, cfg);

    ensure_dir(o.out);
    std::ostringstream mcav, mac, tests;
    dca::write_sweep_table(mcav, s, false);
    dca::write_sweep_table(mac, s, true);
    dca::write_sweep_tests(tests, s);
    write_file(fs::path(o.out) / "sweep_mcav.csv", mcav.str());
    write_file(fs::path(o.out) / "sweep_mac.csv", mac.str());
    write_file(fs::path(o.out) / "sweep_wilcoxon.csv", tests.str());
    nlohmann::json j = dca::to_json(s);
    j["config"] = cfg.to_json();
    write_file(fs::path(o.out) / "sweep.json", dump(j));
    std::cout << "mean " << cfg.suspect << " MCAV\n" << mcav.str() << "\nmean " << cfg.suspect << " MAC\n"
              << mac.str() << "\nWilcoxon signed-rank\n" << tests.str();
    return 0;
}

int cmd_report(const Options& o, const CLI::App& sub) {
    fs::path path = o.in;
    if (fs::is_directory(path)) path /= "aggregate.json";
    std::ifstream in(path);
    if (!in) throw StageError("report", "cannot open '" + path.string() + "'", kExitUsage);
    dca::AggregateReport agg;
    try {
        agg = dca::aggregate_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw StageError("report", path.string() + ": " + e.what(), kExitRuntime);
    }
    double threshold = agg.threshold;
    if (given(sub, "--threshold")) {
        if (!(o.threshold > 0.0 && o.threshold < 1.0)) throw StageError("config", "threshold must be in (0,1)", kExitUsage);
        threshold = o.threshold;
    }
    dca::write_summary(std::cout, agg, threshold);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dendritic cell anomaly detector for host event traces"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "key = value run configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "base seed; run r uses seed + r");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--duration", o.duration, "scenario duration in seconds");
    };

    auto* gen = app.add_subcommand("gen", "generate a scenario trace");
    gen->add_option("--scenario", o.scenarios, "E1, E2.1.a ... E2.3.b, E3")->required()->expected(1);
    add_common(gen);

    auto* run = app.add_subcommand("run", "run the detector and write reports");
    run->add_option("--scenario", o.scenarios, "scenario preset (regenerated per run)")->expected(1);
    run->add_option("--trace", o.traces, "trace file")->expected(1);
    run->add_option("--weights", o.weights, "WS1..WS5, table1, or a weight matrix file");
    run->add_option("--reps", o.reps, "repetitions");
    run->add_option("--threshold", o.threshold, "classification threshold on MAC");
    run->add_flag("--presentations", o.presentations, "also write presentation CSVs");
    add_common(run);

    auto* sweep = app.add_subcommand("sweep", "run all weight presets");
    sweep->add_option("--scenario", o.scenarios, "scenario presets");
    sweep->add_option("--trace", o.traces, "trace files");
    sweep->add_option("--reps", o.reps, "repetitions");
    sweep->add_option("--threshold", o.threshold, "classification threshold on MAC");
    add_common(sweep);

    auto* report = app.add_subcommand("report", "summarise a run directory");
    report->add_option("--in", o.in, "run output directory or aggregate.json")->required();
    report->add_option("--threshold", o.threshold, "reclassify at this threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen) return cmd_gen(o, *gen);
        if (*run) return cmd_run(o, *run);
        if (*sweep) return cmd_sweep(o, *sweep);
        if (*report) return cmd_report(o, *report);
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const dca::ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
