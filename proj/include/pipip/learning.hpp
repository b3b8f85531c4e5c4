#pragma once

#include <cstdint>
#include <vector>

#include "pipip/game.hpp"
#include "pipip/rng.hpp"

namespace pipip {

// Two-step memory per agent: the action/utility pair from the previous step
// (a1, u1) and the one before that (a2, u2). After initialization both pairs
// are equal, so every agent starts in the non-worsened branch.
struct agent_memory {
    action_id a1 = 0;
    action_id a2 = 0;
    double u1 = 0.0;
    double u2 = 0.0;
    double delta() const { return u2 - u1; } // positive iff utility worsened
};

enum class algorithm_kind { pipip, phpip, disl };

struct learner_params {
    algorithm_kind algo = algorithm_kind::pipip;
    double kappa = 0.5;
    bool constant_epsilon = false;
    double epsilon = 0.15; // used when constant_epsilon
    int diameter = 1;      // D in the decreasing schedule t^(-1/(n(D+1)))
};

// Decreasing exploration schedule, defined for t >= 2.
double exploration_rate(int t, int n_agents, int diameter);

// D = max over agents of the reachability-graph diameter (all-pairs BFS).
int diameter_D(const game_definition& g);

// One decision for one agent. reachable = R_i(a1). Non-worsened memories
// explore off a1 with probability eps, else repeat a1. Worsened memories
// explore a fresh action (not a1, not a2) with probability eps; otherwise
// they keep the worsened a1 with probability kappa * eps^delta (the
// deliberately suboptimal acceptance) and return to a2 with the remaining
// mass. On 2-action games the fresh set can be empty; then the exploration
// mass is dropped and the two memory outcomes renormalize to kappa*eps^delta
// and 1 - kappa*eps^delta. A utility drop of 1 or more is a fatal scaling
// error, not a samplable state.
action_id pipip_step(const agent_memory& m, const std::vector<action_id>& reachable,
                     double eps, double kappa, rng_stream& rng);

// Identical to pipip_step with the suboptimal-acceptance branch removed:
// worsened non-explorers always return to a2. Consumes RNG draws in exactly
// the same pattern as pipip_step, so a shared stream yields identical
// behavior whenever kappa * eps^delta would be 0.
action_id disl_step(const agent_memory& m, const std::vector<action_id>& reachable,
                    double eps, rng_stream& rng);

struct episode_trace {
    algorithm_kind algo = algorithm_kind::pipip;
    std::uint64_t seed = 0;
    bool has_potential = false;
    std::vector<int> step;                     // t values, starting at 2
    std::vector<double> epsilon;               // rate used at each step
    std::vector<joint_action> action;          // joint action after the step
    std::vector<std::vector<double>> utility;  // per step, per agent
    std::vector<double> potential;             // 0 when has_potential is false
};

// Runs `horizon` synchronous decision rounds at t = 2 .. horizon+1. All
// agents draw from their t-1 memories simultaneously, utilities are then
// evaluated once at the new joint action, and memories shift. One RNG stream
// per agent, advanced in agent order, so identical seeds give identical
// traces regardless of how episodes are scheduled across threads.
episode_trace run_episode(const game_definition& g, const learner_params& params,
                          int horizon, std::uint64_t seed,
                          const joint_action& initial);

} // namespace pipip
