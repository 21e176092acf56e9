#include "dca/analysis.hpp"
#include "dca/config.hpp"
#include "dca/engine.hpp"
#include "dca/errors.hpp"
#include "dca/event_model.hpp"
#include "dca/experiment.hpp"
#include "dca/scenario.hpp"
#include "dca/signals.hpp"
#include "dca/stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace dca;

namespace {

py::object to_py(const nlohmann::json& j) {
    switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
        py::list out;
        for (const auto& v : j) out.append(to_py(v));
        return out;
    }
    case nlohmann::json::value_t::object: {
        py::dict out;
        for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
        return out;
    }
    default: return py::none();
    }
}

// Config values arrive as Python scalars; the key = value parser wants text.
RunConfig make_config(const py::dict& overrides) {
    RunConfig cfg;
    KeyValues kv;
    for (const auto& [k, v] : overrides) kv[py::str(k)] = py::str(v);
    cfg.apply(kv);
    cfg.validate();
    return cfg;
}

ExperimentSource make_source(const std::optional<std::string>& scenario, const std::optional<std::vector<EventRecord>>& records,
                             const RunConfig& cfg) {
    if (scenario.has_value() == records.has_value()) throw ConfigError("give exactly one of scenario or records");
    if (scenario) return ExperimentSource::from_scenario(*scenario, cfg);
    return ExperimentSource::from_dataset(dataset_from_records(*records), "trace");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dendritic cell anomaly detection for host event traces";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::enum_<CallCategory>(m, "CallCategory")
        .value("communication", CallCategory::communication)
        .value("file_access", CallCategory::file_access)
        .value("keyboard_state", CallCategory::keyboard_state);

    py::class_<EventRecord>(m, "EventRecord")
        .def_readonly("ts", &EventRecord::ts)
        .def_readonly("process_id", &EventRecord::process_id)
        .def_readonly("process_name", &EventRecord::process_name)
        .def_readonly("category", &EventRecord::category)
        .def_readonly("call_name", &EventRecord::call_name)
        .def_property_readonly("direction",
                               [](const EventRecord& r) -> std::optional<std::string> {
                                   if (!r.direction) return std::nullopt;
                                   return std::string(to_string(*r.direction));
                               })
        .def_readonly("seq", &EventRecord::seq)
        .def("__repr__", [](const EventRecord& r) { return "EventRecord(" + format_trace_line(r) + ")"; });

    py::class_<NormalizationConfig>(m, "NormalizationConfig")
        .def(py::init<>())
        .def_readwrite("n_p", &NormalizationConfig::n_p)
        .def_readwrite("n_d", &NormalizationConfig::n_d)
        .def_readwrite("n_s1", &NormalizationConfig::n_s1)
        .def_readwrite("n_s2", &NormalizationConfig::n_s2)
        .def_readwrite("window_ms", &NormalizationConfig::window_ms);

    py::class_<SignalSample>(m, "SignalSample")
        .def_readonly("ts", &SignalSample::ts)
        .def_readonly("pamp", &SignalSample::pamp)
        .def_readonly("ds", &SignalSample::ds)
        .def_readonly("ss", &SignalSample::ss)
        .def("__repr__", [](const SignalSample& s) {
            std::ostringstream out;
            out << "SignalSample(ts=" << s.ts << ", pamp=" << s.pamp << ", ds=" << s.ds << ", ss=" << s.ss << ")";
            return out.str();
        });

    m.def("parse_trace", [](const std::filesystem::path& p) { return parse_trace(p); }, py::arg("path"));
    m.def("parse_trace_text", [](const std::string& text) {
        std::istringstream in(text);
        return parse_trace(in);
    }, py::arg("text"));
    m.def("format_trace", [](const std::vector<EventRecord>& rs) {
        std::ostringstream out;
        write_trace(out, rs);
        return out.str();
    }, py::arg("records"));

    m.def("compute_pamp", &compute_pamp, py::arg("rate"), py::arg("cfg") = NormalizationConfig{});
    m.def("compute_danger", &compute_danger, py::arg("delta_s"), py::arg("cfg") = NormalizationConfig{});
    m.def("compute_safe", &compute_safe, py::arg("gap_s"), py::arg("cfg") = NormalizationConfig{});
    m.def("extract_signals", [](const std::vector<EventRecord>& rs, const NormalizationConfig& cfg) {
        return extract_signals(dataset_from_records(rs), cfg);
    }, py::arg("records"), py::arg("cfg") = NormalizationConfig{});

    m.def("weight_preset_names", &weight_preset_names);
    m.def("weight_preset", [](const std::string& name) { return weight_preset(name).w; }, py::arg("name"),
          "3x3 matrix, rows csm/semi/mat, columns PAMP/DS/SS");
    m.def("fuse_signals", [](double pamp, double ds, double ss, const std::string& weights) {
        const OutputSignals o = fuse_signals({0, pamp, ds, ss}, resolve_weights(weights));
        return py::make_tuple(o.csm, o.semi, o.mat);
    }, py::arg("pamp"), py::arg("ds"), py::arg("ss"), py::arg("weights") = "WS3");

    m.def("scenario_presets", &scenario_preset_ids);
    m.def("generate", [](const std::string& scenario, std::uint64_t seed, std::optional<double> duration) {
        ScenarioConfig sc = scenario_preset(scenario);
        sc.seed = seed;
        if (duration) sc.duration_s = *duration;
        return generate_records(sc);
    }, py::arg("scenario"), py::arg("seed") = 1, py::arg("duration") = std::nullopt);

    m.def("compute_mcav", [](const std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>& zy) {
        PresentationTally t;
        for (const auto& [k, v] : zy) t[k] = {v.first, v.second};
        return compute_mcav(t);
    }, py::arg("tally"), "tally maps antigen type to (mature, total)");
    m.def("compute_mac", &compute_mac, py::arg("mcav"), py::arg("antigen_counts"));
    m.def("classify", [](const ScoreMap& values, double threshold) {
        std::map<std::string, std::string> out;
        for (const auto& [k, l] : classify(values, threshold)) out[k] = std::string(to_string(l));
        return out;
    }, py::arg("values"), py::arg("threshold") = 0.5);

    m.def("mann_whitney_u", [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = stats::mann_whitney_u(a, b);
        return py::make_tuple(r.statistic, r.p_value);
    }, py::arg("a"), py::arg("b"));
    m.def("wilcoxon_signed_rank", [](const std::vector<double>& diffs) {
        const auto r = stats::wilcoxon_signed_rank(diffs);
        return py::make_tuple(r.statistic, r.p_value);
    }, py::arg("diffs"));

    m.def("run", [](std::optional<std::string> scenario, std::optional<std::vector<EventRecord>> records,
                    const py::dict& config) {
        const RunConfig cfg = make_config(config);
        const auto src = make_source(scenario, records, cfg);
        std::vector<AnalysisReport> runs;
        const AggregateReport agg = run_experiment(src, cfg, resolve_weights(cfg.weights), &runs);
        py::dict out;
        out["aggregate"] = to_py(to_json(agg));
        py::list per_run;
        for (const auto& r : runs) per_run.append(to_py(to_json(r)));
        out["runs"] = per_run;
        return out;
    }, py::arg("scenario") = std::nullopt, py::arg("records") = std::nullopt, py::arg("config") = py::dict(),
       "Repeated runs; config takes the keys of the run configuration file.");

    m.def("sweep", [](const std::vector<std::string>& scenarios, const py::dict& config) {
        const RunConfig cfg = make_config(config);
        std::vector<ExperimentSource> sources;
        for (const auto& s : scenarios) sources.push_back(ExperimentSource::from_scenario(s, cfg));
        return to_py(to_json(run_sweep(sources, cfg)));
    }, py::arg("scenarios"), py::arg("config") = py::dict());
}
