#include "pipip/game.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace pipip {

const std::vector<action_id>& restricted_actions(const game_definition& g,
                                                 int agent, action_id a) {
    if (agent < 0 || agent >= g.n_agents)
        throw std::out_of_range("restricted_actions: bad agent index");
    if (a < 0 || a >= g.n_actions[agent])
        throw std::out_of_range("restricted_actions: bad action index");
    return g.reachable[agent][a];
}

static bool contains(const std::vector<action_id>& v, action_id a) {
    return std::find(v.begin(), v.end(), a) != v.end();
}

assumption_report check_assumption1(const game_definition& g) {
    assumption_report rep;
    bool rev_ok = true, conn_ok = true, size_ok = true;
    for (int i = 0; i < g.n_agents; ++i) {
        const auto& maps = g.reachable[i];
        for (action_id a = 0; a < g.n_actions[i]; ++a) {
            if (static_cast<int>(maps[a].size()) < 3) {
                size_ok = false;
                rep.witnesses.push_back({i, a, -1,
                                         static_cast<double>(maps[a].size()),
                                         "reachable set smaller than 3"});
            }
            for (action_id b : maps[a]) {
                if (b < 0 || b >= g.n_actions[i]) {
                    rev_ok = false;
                    rep.witnesses.push_back({i, a, b, 0.0, "target out of range"});
                    continue;
                }
                if (b != a && !contains(maps[b], a)) {
                    rev_ok = false;
                    rep.witnesses.push_back({i, a, b, 0.0,
                                             "move not reversible"});
                }
            }
        }
        // connectivity by BFS over undirected closure from action 0
        std::vector<char> seen(g.n_actions[i], 0);
        std::deque<action_id> queue{0};
        seen[0] = 1;
        int reached = 1;
        while (!queue.empty()) {
            action_id a = queue.front();
            queue.pop_front();
            for (action_id b : maps[a]) {
                if (!seen[b]) {
                    seen[b] = 1;
                    ++reached;
                    queue.push_back(b);
                }
            }
        }
        if (reached != g.n_actions[i]) {
            conn_ok = false;
            for (action_id a = 0; a < g.n_actions[i]; ++a)
                if (!seen[a]) {
                    rep.witnesses.push_back({i, a, -1, 0.0,
                                             "action unreachable from action 0"});
                    break;
                }
        }
    }
    if (!rev_ok) rep.failed_clauses.push_back("reversibility");
    if (!conn_ok) rep.failed_clauses.push_back("feasibility (connectivity)");
    if (!size_ok) rep.failed_clauses.push_back("reachable-set size >= 3");
    rep.pass = rev_ok && conn_ok && size_ok;
    return rep;
}

std::uint64_t joint_action_count(const game_definition& g) {
    std::uint64_t n = 1;
    for (int i = 0; i < g.n_agents; ++i) {
        std::uint64_t m = static_cast<std::uint64_t>(g.n_actions[i]);
        if (m != 0 && n > std::numeric_limits<std::uint64_t>::max() / m)
            return std::numeric_limits<std::uint64_t>::max();
        n *= m;
    }
    return n;
}

std::uint64_t joint_index(const game_definition& g, const joint_action& a) {
    std::uint64_t idx = 0;
    for (int i = 0; i < g.n_agents; ++i)
        idx = idx * static_cast<std::uint64_t>(g.n_actions[i]) +
              static_cast<std::uint64_t>(a[i]);
    return idx;
}

joint_action joint_from_index(const game_definition& g, std::uint64_t idx) {
    joint_action a(g.n_agents, 0);
    for (int i = g.n_agents - 1; i >= 0; --i) {
        std::uint64_t m = static_cast<std::uint64_t>(g.n_actions[i]);
        a[i] = static_cast<action_id>(idx % m);
        idx /= m;
    }
    return a;
}

std::vector<joint_action> enumerate_joint_actions(const game_definition& g,
                                                  std::uint64_t guard) {
    std::uint64_t total = joint_action_count(g);
    if (total > guard)
        throw std::length_error("joint action space exceeds enumeration guard");
    std::vector<joint_action> out;
    out.reserve(total);
    for (std::uint64_t idx = 0; idx < total; ++idx)
        out.push_back(joint_from_index(g, idx));
    return out;
}

// Visits every constrained single-agent deviation (a, i, b) with b in R_i(a_i).
// The visitor gets the base joint action, the agent, and the deviated action.
template <typename F>
static void for_each_deviation(const game_definition& g, std::uint64_t guard,
                               F&& visit) {
    std::uint64_t total = joint_action_count(g);
    if (total > guard)
        throw std::length_error("joint action space exceeds enumeration guard");
    joint_action a(g.n_agents, 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        joint_action base = joint_from_index(g, idx);
        for (int i = 0; i < g.n_agents; ++i)
            for (action_id b : g.reachable[i][base[i]])
                visit(base, i, b);
        (void)a;
    }
}

assumption_report check_assumption2(const game_definition& g,
                                    std::uint64_t guard) {
    assumption_report rep;
    for_each_deviation(g, guard, [&](const joint_action& base, int i, action_id b) {
        double u0 = g.utility(i, base);
        joint_action dev = base;
        dev[i] = b;
        double change = g.utility(i, dev) - u0;
        double mag = std::fabs(change);
        if (mag > rep.worst) rep.worst = mag;
        if (change >= 1.0) {
            rep.pass = false;
            if (rep.witnesses.size() < 16)
                rep.witnesses.push_back({i, base[i], b, change,
                                         "utility change not below 1"});
        }
    });
    if (!rep.pass) rep.failed_clauses.push_back("deviation bound < 1");
    return rep;
}

assumption_report verify_potential_identity(const game_definition& g,
                                            double tol, std::uint64_t guard) {
    if (!g.potential)
        throw std::invalid_argument("verify_potential_identity: no potential oracle");
    assumption_report rep;
    for_each_deviation(g, guard, [&](const joint_action& base, int i, action_id b) {
        joint_action dev = base;
        dev[i] = b;
        double du = g.utility(i, dev) - g.utility(i, base);
        double dp = g.potential(dev) - g.potential(base);
        double residual = std::fabs(du - dp);
        if (residual > rep.worst) rep.worst = residual;
        if (residual > tol) {
            rep.pass = false;
            if (rep.witnesses.size() < 16)
                rep.witnesses.push_back({i, base[i], b, residual,
                                         "deviation mismatch against potential"});
        }
    });
    if (!rep.pass) rep.failed_clauses.push_back("potential identity");
    return rep;
}

std::vector<joint_action> enumerate_nash(const game_definition& g,
                                         std::uint64_t guard) {
    std::uint64_t total = joint_action_count(g);
    if (total > guard)
        throw std::length_error("joint action space exceeds enumeration guard");
    std::vector<joint_action> out;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        joint_action a = joint_from_index(g, idx);
        bool nash = true;
        for (int i = 0; nash && i < g.n_agents; ++i) {
            double u0 = g.utility(i, a);
            joint_action dev = a;
            for (action_id b : g.reachable[i][a[i]]) {
                dev[i] = b;
                if (g.utility(i, dev) > u0) {
                    nash = false;
                    break;
                }
            }
        }
        if (nash) out.push_back(std::move(a));
    }
    return out;
}

std::vector<joint_action> optimal_nash(const game_definition& g,
                                       std::uint64_t guard) {
    if (!g.potential)
        throw std::invalid_argument("optimal_nash: no potential oracle");
    std::uint64_t total = joint_action_count(g);
    if (total > guard)
        throw std::length_error("joint action space exceeds enumeration guard");
    double best = -std::numeric_limits<double>::infinity();
    std::vector<joint_action> out;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        joint_action a = joint_from_index(g, idx);
        double p = g.potential(a);
        if (p > best) {
            best = p;
            out.clear();
            out.push_back(std::move(a));
        } else if (p == best) {
            out.push_back(std::move(a));
        }
    }
    // a potential maximizer must be an equilibrium; verify rather than trust
    auto nash = enumerate_nash(g, guard);
    for (const auto& a : out) {
        if (std::find(nash.begin(), nash.end(), a) == nash.end())
            throw std::logic_error("optimal_nash: potential maximizer is not Nash; "
                                   "game is not the potential game it claims to be");
    }
    return out;
}

} // namespace pipip
