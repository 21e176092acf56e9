#pragma once

// Dendritic cell population.
//
// Each cell samples antigen and accumulates three output signals
// (csm, semi, mat) as weighted sums of the input signals (PAMP, DS, SS).
// When a cell's cumulative csm reaches its migration threshold it presents
// every stored antigen in one context, 0 if semi > mat and 1 otherwise, and
// is replaced by a fresh cell so the population size never changes.

#include "dca/event_model.hpp"
#include "dca/rng.hpp"
#include "dca/signals.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dca {

enum class OutputSignal : std::size_t { csm = 0, semi = 1, mat = 2 };
enum class InputSignal : std::size_t { pamp = 0, ds = 1, ss = 2 };

struct WeightMatrix {
    // w[output][input]
    std::array<std::array<double, 3>, 3> w{};
    std::string preset_name;

    double operator()(OutputSignal j, InputSignal i) const {
        return w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    bool operator==(const WeightMatrix&) const = default;
};

// Presets WS1..WS5; "table1" is an alias of WS3. Throws ConfigError on unknown names.
WeightMatrix weight_preset(std::string_view name);
std::vector<std::string> weight_preset_names();

// Reads a matrix file with lines "csm = a b c", "semi = ...", "mat = ...".
WeightMatrix load_weight_matrix(const std::string& path);

// Preset name or path to a matrix file.
WeightMatrix resolve_weights(const std::string& spec);

struct OutputSignals {
    double csm = 0.0;
    double semi = 0.0;
    double mat = 0.0;

    bool operator==(const OutputSignals&) const = default;
};

OutputSignals fuse_signals(const SignalSample& s, const WeightMatrix& w);

struct PopulationConfig {
    std::size_t population_size = 100;
    double threshold_lo = 200.0;
    double threshold_hi = 800.0;
    std::size_t store_capacity = 50;
    std::size_t antigen_per_cell_per_step = 50;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct DendriticCell {
    std::uint64_t id = 0;
    double migration_threshold = 0.0;
    double cum_csm = 0.0;
    double cum_semi = 0.0;
    double cum_mat = 0.0;
    std::vector<std::string> antigen_store;
    std::size_t taken_this_step = 0;

    int context() const { return cum_semi > cum_mat ? 0 : 1; }
};

struct PresentationRecord {
    std::uint64_t cell_id = 0;
    std::string antigen_type;
    int context = 0;

    bool operator==(const PresentationRecord&) const = default;
};

// Per antigen type: mature presentations (Z) and total presentations (Y).
struct TallyEntry {
    std::uint64_t mature = 0;
    std::uint64_t total = 0;

    bool operator==(const TallyEntry&) const = default;
};
using PresentationTally = std::map<std::string, TallyEntry>;

void add_presentations(PresentationTally& tally, std::span<const PresentationRecord> records);

class Population {
public:
    explicit Population(const PopulationConfig& cfg);

    // Stores the new antigen, adds the fused sample to every cell, then
    // migrates every cell whose csm reached its threshold.
    std::vector<PresentationRecord> step(const SignalSample& sample, std::span<const AntigenEvent> new_antigen,
                                         const WeightMatrix& w);

    // Migrates every live cell with its current outputs (end of stream).
    std::vector<PresentationRecord> migrate_all();

    std::size_t size() const { return cells_.size(); }
    std::span<const DendriticCell> cells() const { return cells_; }
    std::uint64_t sampled() const { return sampled_; }
    std::uint64_t dropped() const { return dropped_; }
    std::uint64_t migrations() const { return migrations_; }

private:
    DendriticCell fresh_cell();
    void present(DendriticCell& cell, std::vector<PresentationRecord>& out);

    PopulationConfig cfg_;
    Rng rng_;
    std::vector<DendriticCell> cells_;
    std::uint64_t next_id_ = 0;
    std::uint64_t sampled_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t migrations_ = 0;
};

struct EngineResult {
    std::vector<PresentationRecord> presentations;
    PresentationTally tally;
    std::uint64_t sampled = 0;
    std::uint64_t dropped = 0;
    std::size_t steps = 0;
};

// Runs the population over a whole dataset; live cells are force-migrated at
// end of stream so every stored antigen is presented exactly once.
EngineResult run_engine(const Dataset& ds, const NormalizationConfig& norm, const PopulationConfig& pop,
                        const WeightMatrix& w);

void write_presentations_csv(std::ostream& out, std::span<const PresentationRecord> records);

} // namespace dca
