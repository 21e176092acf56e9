#pragma once

// Run configuration.
//
// The config file is plain `key = value` text; '#' starts a comment. Every
// numeric that the detector or the scenario generator depends on lives here
// so a run can be reproduced from the config and the seeds alone.
//
//     n_p = 20                 # keyboard calls/s mapped to PAMP 100
//     n_d = 10                 # s, receive->send latency mapped to danger 0
//     n_s1 = 5                 # s, unsafe / uncertain boundary
//     n_s2 = 20                # s, uncertain / safe boundary
//     window_ms = 1000
//     population_size = 100
//     threshold_lo = 200
//     threshold_hi = 800
//     store_capacity = 50
//     antigen_per_cell_per_step = 50
//     weights = WS3            # WS1..WS5, table1, or a matrix file
//     reps = 10
//     seed = 1
//     threshold = 0.5          # classification threshold on MAC
//     suspect = bot            # process name compared against the others
//     scenario.duration = 600  # plus the other scenario.* rate keys

#include "dca/engine.hpp"
#include "dca/scenario.hpp"
#include "dca/signals.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace dca {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

struct RunConfig {
    NormalizationConfig norm;
    PopulationConfig pop;
    std::string weights = "WS3";
    std::size_t reps = 10;
    std::uint64_t seed = 1;
    double threshold = 0.5;
    std::string suspect = "bot";
    ScenarioOverrides scenario;

    void validate() const;

    // Applies keys on top of the current values. Unknown keys are a ConfigError.
    void apply(const KeyValues& kv);

    KeyValues to_key_values() const;
    nlohmann::json to_json() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

} // namespace dca
