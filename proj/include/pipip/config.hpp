#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pipip/coverage.hpp"
#include "pipip/learning.hpp"

namespace pipip {

// Full description of one experiment batch. The text form is an INI-style
// file with sections [world], [learner] and [run]; see emit_config for the
// canonical rendering and the README for the schema.
struct experiment_config {
    coverage_world world;
    int agents = 4;

    algorithm_kind algorithm = algorithm_kind::pipip;
    double kappa = 0.5;
    bool constant_epsilon = true;
    double epsilon = 0.15;

    int horizon = 700;                           // final step index, >= 2
    std::vector<std::uint64_t> seeds;            // distinct, one episode each
    std::vector<std::pair<int, int>> initial;    // (j, l) start cell per agent
    std::string out_dir = "out";
    int threads = 0;                             // 0 = hardware concurrency

    bool operator==(const experiment_config&) const = default;
};

// All-defaults config: 9x6 grid, uniform density, no obstacles, 4 agents in
// the lower-left corner cells, pipip at constant epsilon 0.15, horizon 700,
// seeds 1..50.
experiment_config default_config();

// Strict parse: unknown sections, unknown keys, duplicate keys and malformed
// values all throw std::runtime_error with the offending line number. The
// result is validated (see validate_config). Empty input yields defaults.
experiment_config parse_config(const std::string& text);

// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const experiment_config& c);

// Builds the world and checks every cross-field constraint: horizon >= 2,
// distinct seeds, initial cells standable and one per agent, epsilon in
// (0, 1/2] when constant, phpip requiring constant mode, kappa within
// (1/(C-1), 1/2] where C is the largest reachable-set size of the built
// game. Throws std::runtime_error on the first violation.
void validate_config(const experiment_config& c);

const char* algorithm_name(algorithm_kind k);
algorithm_kind algorithm_from_name(const std::string& name);

// Seed-list syntax shared by the config file and the --seeds flag:
// inclusive range "lo..hi" or comma-separated values.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// Built-in presets mirroring the published experiments.
experiment_config preset_experiment1();        // static gaussian, 4 obstacles
experiment_config preset_experiment1_eps03();  // same with epsilon = 0.3
experiment_config preset_experiment2();        // moving gaussian, horizon 1000
std::vector<std::string> preset_names();
experiment_config preset_by_name(const std::string& name);

} // namespace pipip
