#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pipip {

using action_id = int;
using joint_action = std::vector<action_id>;

// A finite game with per-action reachability constraints. The reachable sets
// may or may not contain the current action itself; all set subtractions in
// the learning rules are literal set differences, so either convention works.
// Oracles taking a step index t support time-varying environments; when the
// *_t variants are absent the static ones are used for every t.
struct game_definition {
    int n_agents = 0;
    std::vector<int> n_actions; // per agent
    // reachable[i][a] = sorted action ids agent i may move to from a
    std::vector<std::vector<std::vector<action_id>>> reachable;
    std::function<double(int, const joint_action&)> utility;
    std::function<double(const joint_action&)> potential; // may be empty
    std::function<double(int, const joint_action&, int)> utility_t;   // may be empty
    std::function<double(const joint_action&, int)> potential_t;      // may be empty
};

const std::vector<action_id>& restricted_actions(const game_definition& g,
                                                 int agent, action_id a);

struct assumption_witness {
    int agent = -1;
    action_id from = -1;
    action_id to = -1;
    double value = 0.0;
    std::string note;
};

struct assumption_report {
    bool pass = true;
    double worst = 0.0; // max observed magnitude for the checked quantity
    std::vector<std::string> failed_clauses;
    std::vector<assumption_witness> witnesses;
};

// (a) reversibility a'∈R_i(a) ⇔ a∈R_i(a'); (b) per-agent connectivity of the
// reachability graph; (c) |R_i(a)| >= 3 everywhere. Failures are reported
// with witnesses, never thrown.
assumption_report check_assumption1(const game_definition& g);

// Every constrained single-agent deviation changes that agent's utility by
// strictly less than 1. Reports the maximal observed |change|.
assumption_report check_assumption2(const game_definition& g,
                                    std::uint64_t guard = 1000000);

// |dU_i - dphi| <= tol over all constrained single-agent deviations.
assumption_report verify_potential_identity(const game_definition& g,
                                            double tol = 1e-9,
                                            std::uint64_t guard = 1000000);

std::uint64_t joint_action_count(const game_definition& g);
std::uint64_t joint_index(const game_definition& g, const joint_action& a);
joint_action joint_from_index(const game_definition& g, std::uint64_t idx);
std::vector<joint_action> enumerate_joint_actions(const game_definition& g,
                                                  std::uint64_t guard = 1000000);

// Pure Nash under the constraint map: no agent can strictly improve by a
// unilateral move within its reachable set. Ties count as equilibria.
std::vector<joint_action> enumerate_nash(const game_definition& g,
                                         std::uint64_t guard = 1000000);

// argmax of the potential; every maximizer is checked to be Nash (a
// violation means the game is not actually a potential game as declared).
std::vector<joint_action> optimal_nash(const game_definition& g,
                                       std::uint64_t guard = 1000000);

} // namespace pipip
