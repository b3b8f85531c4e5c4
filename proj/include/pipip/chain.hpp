#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "pipip/game.hpp"

namespace pipip {

// State of the two-step process: the joint actions at t-2 (prev) and t-1
// (curr). Feasibility requires curr to be reachable from prev agent-wise.
struct chain_state {
    joint_action prev;
    joint_action curr;
    bool operator==(const chain_state& o) const {
        return prev == o.prev && curr == o.curr;
    }
};

struct chain_space {
    const game_definition* game = nullptr;
    std::uint64_t joint_total = 0;
    std::vector<chain_state> states;
    std::unordered_map<std::uint64_t, int> index; // packed prev/curr -> state id

    std::uint64_t pack(const joint_action& prev, const joint_action& curr) const;
    int find(const joint_action& prev, const joint_action& curr) const; // -1 if absent
    bool is_diag(int s) const { return states[s].prev == states[s].curr; }
};

// Enumerates every feasible (prev, curr) pair.
chain_space state_space_B(const game_definition& g, std::size_t guard = 100000);

// Agent roles within one transition (a0,a1) -> (a1,a2):
//   explore_improve  - not worsened, moved off a1 by exploration
//   stay_improve     - not worsened, repeated a1
//   explore_worsen   - worsened, moved to a fresh action
//   suboptimal_stay  - worsened, deliberately kept a1 (resistance delta)
//   revert           - worsened, returned to a2 (or never moved at all)
enum class lambda_class {
    explore_improve,
    stay_improve,
    explore_worsen,
    suboptimal_stay,
    revert
};

struct agent_partition {
    bool feasible = false;
    std::vector<lambda_class> cls; // per agent
    std::vector<double> delta;     // per agent; > 0 only in suboptimal_stay
};

// Requires z2.prev == z1.curr (throws otherwise). Infeasible only for
// targets no decision branch can produce.
agent_partition partition_agents(const chain_state& z1, const chain_state& z2,
                                 const game_definition& g);

// Exact single-agent outcome distribution for the next action, given the
// last two joint actions. This is the same distribution the step samplers
// draw from, including the renormalized two-outcome form when a worsened
// 2-action agent has no fresh action to explore.
std::vector<std::pair<action_id, double>> agent_outcome_distribution(
    const game_definition& g, int agent, const joint_action& prev,
    const joint_action& curr, double eps, double kappa);

// Product over agents of the per-agent outcome probabilities; 0 if the pair
// does not chain or the target is unreachable.
double transition_probability(const chain_state& z1, const chain_state& z2,
                              double eps, double kappa, const game_definition& g);

// |explore_improve| + |explore_worsen| + sum of deltas over suboptimal
// stays; +inf for infeasible pairs.
double transition_resistance(const chain_state& z1, const chain_state& z2,
                             const game_definition& g);

struct transition_matrix {
    // rows[s] = sparse (target state, probability), probabilities sum to 1
    std::vector<std::vector<std::pair<int, double>>> rows;
};

transition_matrix build_transition_model(const chain_space& space, double eps,
                                         double kappa);

// Recurrent classes of the zero-exploration chain (deterministic: stay when
// not worsened, return to a2 when worsened). Throws if any class is not a
// diagonal singleton, since that breaks the standing assumptions the theory
// needs. Returns one state-id set per class.
std::vector<std::vector<int>> recurrent_classes_unperturbed(const chain_space& space);

// Pairwise minimal path resistance between diagonal states, via Dijkstra
// over the full two-step state space (simultaneous multi-agent exploration
// can undercut any composition of single-deviation legs). single_weight
// holds the straight-route weight for single-deviation pairs, +inf elsewhere.
struct resistance_graph {
    std::vector<int> diag_state;                       // state ids, diag only
    std::vector<joint_action> node;                    // the joint action of each
    std::vector<std::vector<double>> min_resistance;   // [from][to]
    std::vector<std::vector<double>> single_weight;    // [from][to], straight routes
};

resistance_graph min_resistance_paths(const chain_space& space);

// Straight two-step route a0 -> a1 where exactly one agent deviates once:
// weight 1 if that agent does not lose utility, else 1 + (loss). Throws if
// the pair is not a single constrained deviation.
double straight_route_resistance(const joint_action& a0, const joint_action& a1,
                                 const game_definition& g);

struct route_reversal_result {
    double lambda_forward = 0.0;
    double lambda_reverse = 0.0;
    double potential_gap = 0.0; // phi(front) - phi(back)
};

// Chained straight routes along consecutive single-deviation nodes; checks
// lambda(forward) - lambda(reverse) == phi(first) - phi(last) within tol.
route_reversal_result route_reversal_check(const std::vector<joint_action>& route,
                                           const game_definition& g,
                                           double tol = 1e-9);

// Minimal total weight of a spanning in-tree of straight-route edges into
// each diagonal node (single-deviation edges suffice for the minima). The
// returned values order-match resistance_graph::node built on the same game.
struct potential_table {
    std::vector<joint_action> node;
    std::vector<double> gamma;
};

potential_table stochastic_potentials(const game_definition& g,
                                      std::size_t guard = 100000);

// Exhaustive in-tree enumeration for small diagonals; used to cross-check
// the arborescence result.
double min_in_tree_exhaustive(const std::vector<std::vector<double>>& weight,
                              int root);

struct stationary_result {
    std::vector<double> mu;   // over space.states
    double residual = 0.0;    // max |muP - mu|
    int iterations = 0;       // 0 for the direct solve
};

// Exact stationary distribution of the constant-rate chain. Direct dense
// solve up to 2000 states, power iteration beyond.
stationary_result stationary_distribution(const chain_space& space, double eps,
                                          double kappa);

// Total mass on diagonal states whose profile maximizes the potential.
double optimal_mass(const std::vector<double>& mu, const chain_space& space);

// CSV exports for offline inspection.
void export_resistance_graph_csv(const resistance_graph& rg, const std::string& path);
void export_stationary_csv(const chain_space& space, const std::vector<double>& mu,
                           const std::string& path);

} // namespace pipip
