#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pipip/config.hpp"
#include "pipip/coverage.hpp"
#include "pipip/learning.hpp"

namespace pipip {

struct seed_result {
    std::uint64_t seed = 0;
    double final_potential = 0.0;
    std::vector<std::pair<int, double>> checkpoints; // (step, potential)
    double optimal_fraction = -1.0;                  // share of steps spent in
                                                     // argmax phi; -1 = unknown
    std::string trace_file;                          // relative to out_dir
};

struct run_summary {
    std::string algorithm;
    std::string arm_key;   // experiment identity modulo learner knobs; arms
                           // must agree on it before they can be compared
    int horizon = 0;
    int agents = 0;
    double optimum = 0.0;  // success-rate denominator
    bool optimum_exact = false;
    double wall_seconds = 0.0;
    std::vector<seed_result> seeds;
};

// Runs one episode per seed across a worker pool (threads = 0 picks the
// hardware count). When out_dir is nonempty, writes one trace CSV per seed
// named trace_<label>_seed<seed>.csv. optimum/optimum_exact are recorded for
// aggregation; optimal-set membership is measured exactly when the joint
// space is small enough to enumerate.
run_summary run_batch(const game_definition& g, const learner_params& params,
                      const std::vector<std::uint64_t>& seeds, int horizon,
                      const joint_action& initial, int threads,
                      const std::string& out_dir, const std::string& label,
                      const std::string& arm_key, double optimum,
                      bool optimum_exact);

// Full config-driven run: builds the coverage game, estimates the optimum by
// greedy placement, dispatches the seeds, and writes config.ini, per-seed
// traces, and summary_<algorithm>.txt into config.out_dir.
run_summary run_experiment(const experiment_config& config);

void write_summary(const std::string& path, const run_summary& s);
// Reads a summary written by write_summary; the arm key is recomputed from
// the config.ini sitting next to it (absent file leaves it empty).
run_summary read_summary(const std::string& path);

struct arm_stats {
    std::string algorithm;
    int n_seeds = 0;
    double median_final = 0.0;
    double q1_final = 0.0;
    double q3_final = 0.0;
    double success_rate = 0.0; // share of seeds with final >= 95% of optimum
    double optimum = 0.0;
    bool optimum_exact = false;
};

struct comparison_report {
    std::vector<arm_stats> arms;
    std::string render() const;
};

// Medians, interquartile ranges and success rates per arm. Throws if any arm
// has no seeds or the arms describe different experiments.
comparison_report aggregate(const std::vector<run_summary>& arms);

// Linear-interpolation quantile (p in [0, 1]) and its median shorthand.
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);

} // namespace pipip
