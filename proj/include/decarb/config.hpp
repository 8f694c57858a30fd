#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "decarb/pipeline.hpp"

namespace decarb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Declarative run configuration. The document is schema-validated before any
// computation: unknown keys are rejected, values are range-checked, and
// resource paths are resolved (config-relative first, then the directory in
// DECARB_DATA_DIR).
struct RunConfig {
    std::uint64_t seed = 0;

    bool synthetic_population = true;
    PopulationSpec population_spec;
    std::filesystem::path population_csv;

    std::filesystem::path solar_profile;
    std::filesystem::path temperature_profile;
    std::filesystem::path grid_trace;
    std::string grid_trace_name;
    std::filesystem::path scc_table;

    Scenario scenario; // cost/emissions/budgets/modes; scc and profiles filled by build_scenario

    std::vector<int> breakeven_horizons{5, 10, 15};
    std::vector<int> survey_n_sweep;
    int diag_seeds = 10;

    std::filesystem::path out_dir = "results";
    std::string prefix = "run";
};

RunConfig load_config(const std::filesystem::path& path);

// Reads the referenced profile, trace and SCC files into the scenario.
Scenario build_scenario(const RunConfig& config);

std::vector<Household> load_population(const RunConfig& config);

std::vector<double> load_profile_csv(const std::filesystem::path& path,
                                     const std::string& value_column);

} // namespace decarb
