#include "dca/engine.hpp"

#include "dca/config.hpp"
#include "dca/errors.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>
#include <utility>

namespace dca {

namespace {

// Columns WS1..WS5; rows csm(PAMP, DS, SS), semi(...), mat(...).
constexpr double kPresets[5][3][3] = {
    {{2, 1, 2}, {0, 0, 1}, {2, 1, -3}},
    {{4, 2, 6}, {0, 0, 1}, {8, 4, -12}},
    {{4, 2, 3}, {0, 0, 1}, {8, 4, -6}},
    {{2, 1, 1.5}, {0, 0, 1}, {8, 4, -6}},
    {{8, 4, 0.6}, {0, 0, 1}, {16, 8, -1.2}},
};

} // namespace

WeightMatrix weight_preset(std::string_view name) {
    std::string_view key = name == "table1" ? std::string_view("WS3") : name;
    for (int k = 0; k < 5; ++k) {
        if (key == "WS" + std::to_string(k + 1)) {
            WeightMatrix m;
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 3; ++i) m.w[j][i] = kPresets[k][j][i];
            m.preset_name = std::string(key);
            return m;
        }
    }
    throw ConfigError("unknown weight preset '" + std::string(name) + "'");
}

std::vector<std::string> weight_preset_names() { return {"WS1", "WS2", "WS3", "WS4", "WS5"}; }

WeightMatrix load_weight_matrix(const std::string& path) {
    const KeyValues kv = read_key_values(path);
    WeightMatrix m;
    m.preset_name = std::filesystem::path(path).filename().string();
    const char* rows[3] = {"csm", "semi", "mat"};
    for (int j = 0; j < 3; ++j) {
        auto it = kv.find(rows[j]);
        if (it == kv.end()) throw ConfigError(path + ": missing row '" + rows[j] + "'");
        std::istringstream in(it->second);
        for (int i = 0; i < 3; ++i)
            if (!(in >> m.w[j][i])) throw ConfigError(path + ": row '" + rows[j] + "' needs 3 numbers");
        std::string extra;
        if (in >> extra) throw ConfigError(path + ": row '" + rows[j] + "' has more than 3 numbers");
    }
    for (const auto& [k, v] : kv)
        if (k != "csm" && k != "semi" && k != "mat") throw ConfigError(path + ": unknown key '" + k + "'");
    return m;
}

WeightMatrix resolve_weights(const std::string& spec) {
    if (spec == "table1" || (spec.size() == 3 && spec.rfind("WS", 0) == 0 && spec[2] >= '1' && spec[2] <= '5'))
        return weight_preset(spec);
    if (std::filesystem::exists(spec)) return load_weight_matrix(spec);
    throw ConfigError("unknown weights '" + spec + "' (expected WS1..WS5, table1 or a matrix file)");
}

OutputSignals fuse_signals(const SignalSample& s, const WeightMatrix& w) {
    const double in[3] = {s.pamp, s.ds, s.ss};
    double out[3];
    for (std::size_t j = 0; j < 3; ++j) out[j] = w.w[j][0] * in[0] + w.w[j][1] * in[1] + w.w[j][2] * in[2];
    return {out[0], out[1], out[2]};
}

void PopulationConfig::validate() const {
    if (population_size == 0) throw ConfigError("population_size must be positive");
    if (!(threshold_lo > 0 && threshold_lo <= threshold_hi)) throw ConfigError("require 0 < threshold_lo <= threshold_hi");
    if (store_capacity == 0) throw ConfigError("store_capacity must be positive");
    if (antigen_per_cell_per_step == 0) throw ConfigError("antigen_per_cell_per_step must be positive");
}

void add_presentations(PresentationTally& tally, std::span<const PresentationRecord> records) {
    for (const auto& r : records) {
        auto& e = tally[r.antigen_type];
        ++e.total;
        if (r.context == 1) ++e.mature;
    }
}

Population::Population(const PopulationConfig& cfg) : cfg_(cfg), rng_(cfg.rng_seed) {
    cfg_.validate();
    cells_.reserve(cfg_.population_size);
    for (std::size_t i = 0; i < cfg_.population_size; ++i) cells_.push_back(fresh_cell());
}

DendriticCell Population::fresh_cell() {
    DendriticCell c;
    c.id = next_id_++;
    c.migration_threshold = rng_.uniform(cfg_.threshold_lo, cfg_.threshold_hi);
    c.antigen_store.reserve(cfg_.store_capacity);
    return c;
}

void Population::present(DendriticCell& cell, std::vector<PresentationRecord>& out) {
    const int ctx = cell.context();
    for (auto& a : cell.antigen_store) out.push_back({cell.id, std::move(a), ctx});
    ++migrations_;
    cell = fresh_cell();
}

std::vector<PresentationRecord> Population::step(const SignalSample& sample, std::span<const AntigenEvent> new_antigen,
                                                 const WeightMatrix& w) {
    for (auto& c : cells_) c.taken_this_step = 0;
    for (const auto& a : new_antigen) {
        ++sampled_;
        auto& cell = cells_[rng_.index(cells_.size())];
        if (cell.antigen_store.size() >= cfg_.store_capacity ||
            cell.taken_this_step >= cfg_.antigen_per_cell_per_step) {
            ++dropped_;
            continue;
        }
        cell.antigen_store.push_back(a.antigen_type);
        ++cell.taken_this_step;
    }

    const OutputSignals o = fuse_signals(sample, w);
    std::vector<PresentationRecord> out;
    for (auto& c : cells_) {
        c.cum_csm += o.csm;
        c.cum_semi += o.semi;
        c.cum_mat += o.mat;
        if (c.cum_csm >= c.migration_threshold) present(c, out);
    }
    return out;
}

std::vector<PresentationRecord> Population::migrate_all() {
    std::vector<PresentationRecord> out;
    for (auto& c : cells_) present(c, out);
    return out;
}

EngineResult run_engine(const Dataset& ds, const NormalizationConfig& norm, const PopulationConfig& pop,
                        const WeightMatrix& w) {
    EngineResult result;
    if (ds.empty()) return result;

    const auto samples = extract_signals(ds, norm);
    Population population(pop);
    std::vector<AntigenEvent> batch;
    std::size_t i = 0;
    for (const auto& s : samples) {
        batch.clear();
        const std::int64_t end = s.ts + norm.window_ms;
        for (; i < ds.items.size() && ds.items[i].ts() < end; ++i)
            if (ds.items[i].is_antigen()) batch.push_back(ds.items[i].antigen());
        auto out = population.step(s, batch, w);
        result.presentations.insert(result.presentations.end(), std::make_move_iterator(out.begin()),
                                    std::make_move_iterator(out.end()));
    }
    auto rest = population.migrate_all();
    result.presentations.insert(result.presentations.end(), std::make_move_iterator(rest.begin()),
                                std::make_move_iterator(rest.end()));
    add_presentations(result.tally, result.presentations);
    result.sampled = population.sampled();
    result.dropped = population.dropped();
    result.steps = samples.size();
    return result;
}

void write_presentations_csv(std::ostream& out, std::span<const PresentationRecord> records) {
    out << "cell_id,antigen_type,context\n";
    for (const auto& r : records) out << r.cell_id << ',' << r.antigen_type << ',' << r.context << '\n';
}

} // namespace dca
