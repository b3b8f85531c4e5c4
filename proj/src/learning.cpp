#include "pipip/learning.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace pipip {

double exploration_rate(int t, int n_agents, int diameter) {
    if (t < 2) throw std::domain_error("exploration_rate: t must be >= 2");
    if (n_agents < 1 || diameter < 1)
        throw std::domain_error("exploration_rate: n and D must be positive");
    double exponent = -1.0 / (static_cast<double>(n_agents) * (diameter + 1));
    return std::pow(static_cast<double>(t), exponent);
}

int diameter_D(const game_definition& g) {
    int worst = 0;
    for (int i = 0; i < g.n_agents; ++i) {
        int n = g.n_actions[i];
        for (action_id src = 0; src < n; ++src) {
            std::vector<int> dist(n, -1);
            std::deque<action_id> queue{src};
            dist[src] = 0;
            while (!queue.empty()) {
                action_id a = queue.front();
                queue.pop_front();
                for (action_id b : g.reachable[i][a])
                    if (dist[b] < 0) {
                        dist[b] = dist[a] + 1;
                        queue.push_back(b);
                    }
            }
            for (action_id b = 0; b < n; ++b) {
                if (dist[b] < 0)
                    throw std::runtime_error("diameter_D: reachability graph disconnected");
                worst = std::max(worst, dist[b]);
            }
        }
    }
    return worst;
}

// Shared decision core. `accept_coeff` is kappa for the suboptimal-acceptance
// rule and 0 for the always-revert baseline; both variants draw the same
// uniforms so streams stay aligned between them.
static action_id step_core(const agent_memory& m,
                           const std::vector<action_id>& reachable,
                           double eps, double accept_coeff, rng_stream& rng) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("step: exploration rate must lie in (0,1)");

    if (m.u1 >= m.u2) {
        // not worsened: explore anywhere reachable except the current action
        int fresh = 0;
        for (action_id b : reachable)
            if (b != m.a1) ++fresh;
        if (fresh > 0 && rng.uniform01() < eps) {
            int k = rng.index(fresh);
            for (action_id b : reachable)
                if (b != m.a1 && k-- == 0) return b;
        }
        return m.a1;
    }

    double delta = m.delta();
    if (delta >= 1.0)
        throw std::domain_error("step: utility dropped by 1 or more in one move; "
                                "utilities are not scaled for the deviation bound");

    int fresh = 0;
    for (action_id b : reachable)
        if (b != m.a1 && b != m.a2) ++fresh;
    if (fresh > 0 && rng.uniform01() < eps) {
        int k = rng.index(fresh);
        for (action_id b : reachable)
            if (b != m.a1 && b != m.a2 && k-- == 0) return b;
    }
    // keep the worsened action with probability accept_coeff * eps^delta,
    // otherwise return to the remembered better one
    double keep = accept_coeff * std::pow(eps, delta);
    return (rng.uniform01() < keep) ? m.a1 : m.a2;
}

action_id pipip_step(const agent_memory& m, const std::vector<action_id>& reachable,
                     double eps, double kappa, rng_stream& rng) {
    if (!(kappa > 0.0 && kappa <= 0.5))
        throw std::domain_error("pipip_step: kappa must lie in (0, 1/2]");
    return step_core(m, reachable, eps, kappa, rng);
}

action_id disl_step(const agent_memory& m, const std::vector<action_id>& reachable,
                    double eps, rng_stream& rng) {
    return step_core(m, reachable, eps, 0.0, rng);
}

episode_trace run_episode(const game_definition& g, const learner_params& params,
                          int horizon, std::uint64_t seed,
                          const joint_action& initial) {
    if (horizon < 1) throw std::domain_error("run_episode: horizon must be >= 1");
    if (static_cast<int>(initial.size()) != g.n_agents)
        throw std::invalid_argument("run_episode: initial action has wrong arity");

    const bool time_varying = static_cast<bool>(g.utility_t);
    auto eval_utility = [&](int i, const joint_action& a, int t) {
        return time_varying ? g.utility_t(i, a, t) : g.utility(i, a);
    };
    const bool has_phi = static_cast<bool>(g.potential_t) || static_cast<bool>(g.potential);
    auto eval_potential = [&](const joint_action& a, int t) {
        if (g.potential_t) return g.potential_t(a, t);
        return g.potential(a);
    };

    std::vector<rng_stream> streams;
    streams.reserve(g.n_agents);
    for (int i = 0; i < g.n_agents; ++i)
        streams.emplace_back(seed, static_cast<std::uint32_t>(i));

    std::vector<agent_memory> mem(g.n_agents);
    for (int i = 0; i < g.n_agents; ++i) {
        double u = eval_utility(i, initial, 0);
        mem[i] = {initial[i], initial[i], u, u};
    }

    const bool accept_worse = params.algo != algorithm_kind::disl;

    episode_trace trace;
    trace.algo = params.algo;
    trace.seed = seed;
    trace.has_potential = has_phi;
    trace.step.reserve(horizon);
    trace.epsilon.reserve(horizon);
    trace.action.reserve(horizon);
    trace.utility.reserve(horizon);
    trace.potential.reserve(horizon);

    joint_action current(g.n_agents, 0);
    std::vector<double> utils(g.n_agents, 0.0);
    for (int k = 0; k < horizon; ++k) {
        int t = k + 2;
        double eps = params.constant_epsilon
                         ? params.epsilon
                         : exploration_rate(t, g.n_agents, params.diameter);
        for (int i = 0; i < g.n_agents; ++i) {
            const auto& reach = g.reachable[i][mem[i].a1];
            current[i] = accept_worse
                             ? pipip_step(mem[i], reach, eps, params.kappa, streams[i])
                             : disl_step(mem[i], reach, eps, streams[i]);
        }
        for (int i = 0; i < g.n_agents; ++i)
            utils[i] = eval_utility(i, current, t);
        for (int i = 0; i < g.n_agents; ++i) {
            mem[i].a2 = mem[i].a1;
            mem[i].a1 = current[i];
            mem[i].u2 = mem[i].u1;
            mem[i].u1 = utils[i];
        }
        trace.step.push_back(t);
        trace.epsilon.push_back(eps);
        trace.action.push_back(current);
        trace.utility.push_back(utils);
        trace.potential.push_back(has_phi ? eval_potential(current, t) : 0.0);
    }
    return trace;
}

} // namespace pipip
