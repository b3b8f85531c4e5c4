#include "pipip/chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

#include "pipip/num_format.hpp"

namespace pipip {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::uint64_t chain_space::pack(const joint_action& prev,
                                const joint_action& curr) const {
    return joint_index(*game, prev) * joint_total + joint_index(*game, curr);
}

int chain_space::find(const joint_action& prev, const joint_action& curr) const {
    auto it = index.find(pack(prev, curr));
    return it == index.end() ? -1 : it->second;
}

chain_space state_space_B(const game_definition& g, std::size_t guard) {
    chain_space space;
    space.game = &g;
    space.joint_total = joint_action_count(g);

    std::uint64_t bound = 0;
    joint_action prev(g.n_agents, 0);
    for (std::uint64_t idx = 0; idx < space.joint_total; ++idx) {
        prev = joint_from_index(g, idx);
        std::uint64_t succ = 1;
        for (int i = 0; i < g.n_agents; ++i)
            succ *= g.reachable[i][prev[i]].size();
        bound += succ;
        if (bound > guard)
            throw std::length_error("state_space_B: state count exceeds guard");
    }

    space.states.reserve(bound);
    for (std::uint64_t idx = 0; idx < space.joint_total; ++idx) {
        prev = joint_from_index(g, idx);
        // odometer over the product of reachable sets
        std::vector<std::size_t> pos(g.n_agents, 0);
        joint_action curr(g.n_agents, 0);
        while (true) {
            for (int i = 0; i < g.n_agents; ++i)
                curr[i] = g.reachable[i][prev[i]][pos[i]];
            int id = static_cast<int>(space.states.size());
            space.states.push_back({prev, curr});
            space.index.emplace(space.pack(prev, curr), id);
            int i = g.n_agents - 1;
            while (i >= 0 && ++pos[i] == g.reachable[i][prev[i]].size()) {
                pos[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
    }
    return space;
}

agent_partition partition_agents(const chain_state& z1, const chain_state& z2,
                                 const game_definition& g) {
    if (z2.prev != z1.curr)
        throw std::invalid_argument("partition_agents: states do not chain");
    const joint_action& a0 = z1.prev;
    const joint_action& a1 = z1.curr;
    const joint_action& a2 = z2.curr;

    agent_partition part;
    part.feasible = true;
    part.cls.resize(g.n_agents);
    part.delta.assign(g.n_agents, 0.0);

    for (int i = 0; i < g.n_agents; ++i) {
        const auto& reach = g.reachable[i][a1[i]];
        if (std::find(reach.begin(), reach.end(), a2[i]) == reach.end()) {
            part.feasible = false;
            return part;
        }
        double u_before = g.utility(i, a0);
        double u_after = g.utility(i, a1);
        if (u_after >= u_before) {
            part.cls[i] = (a2[i] == a1[i]) ? lambda_class::stay_improve
                                           : lambda_class::explore_improve;
        } else if (a2[i] == a1[i] && a1[i] != a0[i]) {
            part.cls[i] = lambda_class::suboptimal_stay;
            part.delta[i] = u_before - u_after;
        } else if (a2[i] == a0[i]) {
            // covers the merged case a1[i] == a0[i], where staying and
            // reverting are the same move with zero resistance
            part.cls[i] = lambda_class::revert;
        } else {
            part.cls[i] = lambda_class::explore_worsen;
        }
    }
    return part;
}

std::vector<std::pair<action_id, double>> agent_outcome_distribution(
    const game_definition& g, int agent, const joint_action& prev,
    const joint_action& curr, double eps, double kappa) {
    const auto& reach = g.reachable[agent][curr[agent]];
    double u_before = g.utility(agent, prev);
    double u_after = g.utility(agent, curr);

    std::vector<std::pair<action_id, double>> out;
    auto add = [&out](action_id a, double p) {
        for (auto& [b, q] : out)
            if (b == a) {
                q += p;
                return;
            }
        out.emplace_back(a, p);
    };

    if (u_after >= u_before) {
        int fresh = 0;
        for (action_id b : reach)
            if (b != curr[agent]) ++fresh;
        if (fresh == 0) {
            add(curr[agent], 1.0);
        } else {
            for (action_id b : reach)
                if (b != curr[agent]) add(b, eps / fresh);
            add(curr[agent], 1.0 - eps);
        }
    } else {
        double delta = u_before - u_after;
        double keep = kappa * std::pow(eps, delta);
        int fresh = 0;
        for (action_id b : reach)
            if (b != curr[agent] && b != prev[agent]) ++fresh;
        if (fresh == 0) {
            // no fresh action: exploration mass drops, memory outcomes renormalize
            add(curr[agent], keep);
            add(prev[agent], 1.0 - keep);
        } else {
            for (action_id b : reach)
                if (b != curr[agent] && b != prev[agent]) add(b, eps / fresh);
            add(curr[agent], (1.0 - eps) * keep);
            add(prev[agent], (1.0 - eps) * (1.0 - keep));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double transition_probability(const chain_state& z1, const chain_state& z2,
                              double eps, double kappa, const game_definition& g) {
    if (z2.prev != z1.curr) return 0.0;
    double p = 1.0;
    for (int i = 0; i < g.n_agents; ++i) {
        // an actual move must be executable; staying put always is. The
        // distinction only matters when reversibility is broken and the
        // sampler would name a revert target the action graph forbids.
        if (z2.curr[i] != z1.curr[i]) {
            const auto& reach = g.reachable[i][z1.curr[i]];
            if (std::find(reach.begin(), reach.end(), z2.curr[i]) == reach.end())
                return 0.0;
        }
        double pi = 0.0;
        for (const auto& [b, q] : agent_outcome_distribution(g, i, z1.prev,
                                                             z1.curr, eps, kappa))
            if (b == z2.curr[i]) {
                pi = q;
                break;
            }
        if (pi == 0.0) return 0.0;
        p *= pi;
    }
    return p;
}

double transition_resistance(const chain_state& z1, const chain_state& z2,
                             const game_definition& g) {
    agent_partition part = partition_agents(z1, z2, g);
    if (!part.feasible) return kInf;
    double r = 0.0;
    for (int i = 0; i < g.n_agents; ++i) {
        switch (part.cls[i]) {
        case lambda_class::explore_improve:
        case lambda_class::explore_worsen:
            r += 1.0;
            break;
        case lambda_class::suboptimal_stay:
            r += part.delta[i];
            break;
        default:
            break;
        }
    }
    return r;
}

transition_matrix build_transition_model(const chain_space& space, double eps,
                                         double kappa) {
    const game_definition& g = *space.game;
    transition_matrix out;
    out.rows.resize(space.states.size());

    std::vector<std::vector<std::pair<action_id, double>>> dists(g.n_agents);
    for (std::size_t s = 0; s < space.states.size(); ++s) {
        const chain_state& z = space.states[s];
        for (int i = 0; i < g.n_agents; ++i)
            dists[i] = agent_outcome_distribution(g, i, z.prev, z.curr, eps, kappa);

        // cartesian product of per-agent outcomes
        std::vector<std::size_t> pos(g.n_agents, 0);
        joint_action next(g.n_agents, 0);
        auto& row = out.rows[s];
        while (true) {
            double p = 1.0;
            for (int i = 0; i < g.n_agents; ++i) {
                next[i] = dists[i][pos[i]].first;
                p *= dists[i][pos[i]].second;
            }
            int target = space.find(z.curr, next);
            if (target < 0)
                throw std::logic_error("build_transition_model: successor not in state space");
            row.emplace_back(target, p);
            int i = g.n_agents - 1;
            while (i >= 0 && ++pos[i] == dists[i].size()) {
                pos[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
        std::sort(row.begin(), row.end());
    }
    return out;
}

std::vector<std::vector<int>> recurrent_classes_unperturbed(const chain_space& space) {
    const game_definition& g = *space.game;
    // zero exploration makes the chain deterministic: keep the action when
    // not worsened, otherwise go back to the previous one
    std::vector<int> succ(space.states.size(), -1);
    for (std::size_t s = 0; s < space.states.size(); ++s) {
        const chain_state& z = space.states[s];
        joint_action next(g.n_agents, 0);
        for (int i = 0; i < g.n_agents; ++i) {
            double u_before = g.utility(i, z.prev);
            double u_after = g.utility(i, z.curr);
            next[i] = (u_after >= u_before) ? z.curr[i] : z.prev[i];
        }
        succ[s] = space.find(z.curr, next);
        if (succ[s] < 0)
            throw std::logic_error("recurrent_classes_unperturbed: successor not in state space");
    }

    // cycles of the functional graph are exactly the recurrent classes
    std::vector<int> color(space.states.size(), 0); // 0 new, 1 in progress, 2 done
    std::vector<char> recurrent(space.states.size(), 0);
    for (std::size_t s0 = 0; s0 < space.states.size(); ++s0) {
        if (color[s0]) continue;
        std::vector<int> path;
        int s = static_cast<int>(s0);
        while (color[s] == 0) {
            color[s] = 1;
            path.push_back(s);
            s = succ[s];
        }
        if (color[s] == 1) { // found a new cycle; mark it
            int u = s;
            do {
                recurrent[u] = 1;
                u = succ[u];
            } while (u != s);
        }
        for (int v : path) color[v] = 2;
    }

    std::vector<std::vector<int>> classes;
    std::vector<char> claimed(space.states.size(), 0);
    for (std::size_t s = 0; s < space.states.size(); ++s) {
        if (!recurrent[s] || claimed[s]) continue;
        std::vector<int> cls;
        int u = static_cast<int>(s);
        do {
            cls.push_back(u);
            claimed[u] = 1;
            u = succ[u];
        } while (u != static_cast<int>(s));
        std::sort(cls.begin(), cls.end());
        classes.push_back(std::move(cls));
    }

    for (const auto& cls : classes)
        if (cls.size() != 1 || !space.is_diag(cls[0]))
            throw std::logic_error("recurrent_classes_unperturbed: a recurrent class is "
                                   "not a diagonal singleton; standing assumptions broken");
    std::sort(classes.begin(), classes.end());
    return classes;
}

double straight_route_resistance(const joint_action& a0, const joint_action& a1,
                                 const game_definition& g) {
    int mover = -1;
    for (int i = 0; i < g.n_agents; ++i) {
        if (a0[i] == a1[i]) continue;
        if (mover >= 0)
            throw std::invalid_argument("straight_route_resistance: more than one agent moves");
        mover = i;
    }
    if (mover < 0)
        throw std::invalid_argument("straight_route_resistance: no agent moves");
    const auto& reach = g.reachable[mover][a0[mover]];
    if (std::find(reach.begin(), reach.end(), a1[mover]) == reach.end())
        throw std::invalid_argument("straight_route_resistance: move not reachable");
    double change = g.utility(mover, a1) - g.utility(mover, a0);
    return change >= 0.0 ? 1.0 : 1.0 - change;
}

route_reversal_result route_reversal_check(const std::vector<joint_action>& route,
                                           const game_definition& g, double tol) {
    if (route.size() < 2)
        throw std::invalid_argument("route_reversal_check: need at least two nodes");
    route_reversal_result res;
    for (std::size_t k = 0; k + 1 < route.size(); ++k) {
        res.lambda_forward += straight_route_resistance(route[k], route[k + 1], g);
        res.lambda_reverse += straight_route_resistance(route[k + 1], route[k], g);
    }
    res.potential_gap = g.potential(route.front()) - g.potential(route.back());
    if (std::fabs((res.lambda_forward - res.lambda_reverse) - res.potential_gap) > tol)
        throw std::logic_error("route_reversal_check: reversal identity violated");
    return res;
}

resistance_graph min_resistance_paths(const chain_space& space) {
    const game_definition& g = *space.game;
    resistance_graph rg;
    for (std::size_t s = 0; s < space.states.size(); ++s)
        if (space.is_diag(static_cast<int>(s))) {
            rg.diag_state.push_back(static_cast<int>(s));
            rg.node.push_back(space.states[s].curr);
        }
    const int nd = static_cast<int>(rg.diag_state.size());
    rg.min_resistance.assign(nd, std::vector<double>(nd, kInf));
    rg.single_weight.assign(nd, std::vector<double>(nd, kInf));

    // resistance-weighted successors, enumerated on demand
    auto successors = [&](int s) {
        std::vector<std::pair<int, double>> out;
        const chain_state& z = space.states[s];
        std::vector<std::size_t> pos(g.n_agents, 0);
        joint_action next(g.n_agents, 0);
        while (true) {
            for (int i = 0; i < g.n_agents; ++i)
                next[i] = g.reachable[i][z.curr[i]][pos[i]];
            int target = space.find(z.curr, next);
            chain_state z2{z.curr, next};
            out.emplace_back(target, transition_resistance(z, z2, g));
            int i = g.n_agents - 1;
            while (i >= 0 && ++pos[i] == g.reachable[i][z.curr[i]].size()) {
                pos[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
        return out;
    };

    for (int d = 0; d < nd; ++d) {
        // Dijkstra over the full two-step space
        std::vector<double> dist(space.states.size(), kInf);
        using item = std::pair<double, int>;
        std::priority_queue<item, std::vector<item>, std::greater<>> heap;
        dist[rg.diag_state[d]] = 0.0;
        heap.push({0.0, rg.diag_state[d]});
        while (!heap.empty()) {
            auto [dcur, s] = heap.top();
            heap.pop();
            if (dcur > dist[s]) continue;
            for (auto [t, w] : successors(s)) {
                if (dcur + w < dist[t]) {
                    dist[t] = dcur + w;
                    heap.push({dist[t], t});
                }
            }
        }
        for (int e = 0; e < nd; ++e)
            rg.min_resistance[d][e] = dist[rg.diag_state[e]];
    }

    for (int d = 0; d < nd; ++d)
        for (int e = 0; e < nd; ++e) {
            if (d == e) continue;
            const joint_action& a = rg.node[d];
            const joint_action& b = rg.node[e];
            int mover = -1;
            bool single = true;
            for (int i = 0; i < g.n_agents; ++i)
                if (a[i] != b[i]) {
                    if (mover >= 0) single = false;
                    mover = i;
                }
            if (!single || mover < 0) continue;
            const auto& reach = g.reachable[mover][a[mover]];
            if (std::find(reach.begin(), reach.end(), b[mover]) == reach.end())
                continue;
            rg.single_weight[d][e] = straight_route_resistance(a, b, g);
        }
    return rg;
}

namespace {

struct arb_edge {
    int from, to;
    double w;
};

// Chu-Liu/Edmonds minimum spanning arborescence. Edges point from child
// toward parent here, i.e. the result is a minimum in-tree: every node but
// the root keeps exactly one outgoing edge and all paths lead to the root.
double min_in_arborescence(int n, int root, std::vector<arb_edge> edges) {
    // classic algorithm wants in-degree-1 at non-roots, so flip directions
    for (auto& e : edges) std::swap(e.from, e.to);
    double total = 0.0;
    while (true) {
        std::vector<double> in_w(n, kInf);
        std::vector<int> pre(n, -1);
        for (const auto& e : edges)
            if (e.from != e.to && e.w < in_w[e.to]) {
                in_w[e.to] = e.w;
                pre[e.to] = e.from;
            }
        for (int v = 0; v < n; ++v)
            if (v != root && pre[v] < 0) return kInf; // not spanning
        int cycles = 0;
        std::vector<int> id(n, -1), vis(n, -1);
        for (int v = 0; v < n; ++v)
            if (v != root) total += in_w[v];
        for (int v = 0; v < n; ++v) {
            int u = v;
            while (u != root && vis[u] == -1 && id[u] == -1) {
                vis[u] = v;
                u = pre[u];
            }
            if (u != root && id[u] == -1 && vis[u] == v) {
                for (int w = pre[u]; w != u; w = pre[w]) id[w] = cycles;
                id[u] = cycles++;
            }
        }
        if (cycles == 0) return total;
        for (int v = 0; v < n; ++v)
            if (id[v] == -1) id[v] = cycles++;
        std::vector<arb_edge> next;
        for (const auto& e : edges) {
            int fu = id[e.from], tv = id[e.to];
            if (fu != tv) next.push_back({fu, tv, e.w - in_w[e.to]});
        }
        edges = std::move(next);
        root = id[root];
        n = cycles;
    }
}

} // namespace

double min_in_tree_exhaustive(const std::vector<std::vector<double>>& weight,
                              int root) {
    const int n = static_cast<int>(weight.size());
    std::vector<int> parent(n, -1);
    double best = kInf;
    // odometer over parent choices for every non-root node
    std::vector<int> choice(n, 0);
    while (true) {
        bool valid = true;
        double total = 0.0;
        for (int v = 0; v < n && valid; ++v) {
            if (v == root) continue;
            parent[v] = choice[v];
            if (parent[v] == v || weight[v][parent[v]] == kInf) valid = false;
            else total += weight[v][parent[v]];
        }
        if (valid) {
            // every node must reach the root without cycling
            for (int v = 0; v < n && valid; ++v) {
                int u = v, hops = 0;
                while (u != root && hops++ <= n) u = parent[u];
                if (u != root) valid = false;
            }
            if (valid && total < best) best = total;
        }
        int v = n - 1;
        while (v >= 0) {
            if (v == root) {
                --v;
                continue;
            }
            if (++choice[v] < n) break;
            choice[v] = 0;
            --v;
        }
        if (v < 0) break;
    }
    return best;
}

potential_table stochastic_potentials(const game_definition& g, std::size_t guard) {
    std::uint64_t total = joint_action_count(g);
    if (total > guard)
        throw std::length_error("stochastic_potentials: joint space exceeds guard");
    const int n = static_cast<int>(total);

    potential_table table;
    table.node.reserve(n);
    for (int v = 0; v < n; ++v)
        table.node.push_back(joint_from_index(g, static_cast<std::uint64_t>(v)));

    std::vector<arb_edge> edges;
    for (int u = 0; u < n; ++u)
        for (int i = 0; i < g.n_agents; ++i)
            for (action_id b : g.reachable[i][table.node[u][i]]) {
                if (b == table.node[u][i]) continue;
                joint_action to = table.node[u];
                to[i] = b;
                int v = static_cast<int>(joint_index(g, to));
                edges.push_back({u, v, straight_route_resistance(table.node[u],
                                                                 table.node[v], g)});
            }

    table.gamma.resize(n);
    for (int root = 0; root < n; ++root) {
        table.gamma[root] = min_in_arborescence(n, root, edges);
        if (table.gamma[root] == kInf)
            throw std::runtime_error("stochastic_potentials: single-deviation graph "
                                     "does not span; feasibility assumption broken");
    }
    return table;
}

stationary_result stationary_distribution(const chain_space& space, double eps,
                                          double kappa) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::domain_error("stationary_distribution: eps must lie in (0, 1/2]");
    transition_matrix P = build_transition_model(space, eps, kappa);
    const int n = static_cast<int>(space.states.size());

    stationary_result res;
    if (n <= 2000) {
        // solve mu P = mu with the first balance equation replaced by sum = 1
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (int s = 0; s < n; ++s)
            for (auto [t, p] : P.rows[s]) A(t, s) += p; // A = P^T
        for (int v = 0; v < n; ++v) A(v, v) -= 1.0;
        for (int v = 0; v < n; ++v) A(0, v) = 1.0;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        b(0) = 1.0;
        Eigen::VectorXd mu = A.partialPivLu().solve(b);
        res.mu.assign(mu.data(), mu.data() + n);
    } else {
        std::vector<double> mu(n, 1.0 / n), next(n, 0.0);
        const int cap = 2000000;
        for (res.iterations = 1; res.iterations <= cap; ++res.iterations) {
            std::fill(next.begin(), next.end(), 0.0);
            for (int s = 0; s < n; ++s)
                for (auto [t, p] : P.rows[s]) next[t] += mu[s] * p;
            double diff = 0.0;
            for (int v = 0; v < n; ++v)
                diff = std::max(diff, std::fabs(next[v] - mu[v]));
            mu.swap(next);
            if (diff < 1e-12) break;
        }
        res.mu = std::move(mu);
    }

    // scrub solver dust and renormalize before the residual check
    double sum = 0.0;
    for (double& v : res.mu) {
        if (v < 0.0 && v > -1e-12) v = 0.0;
        sum += v;
    }
    for (double& v : res.mu) v /= sum;

    std::vector<double> muP(n, 0.0);
    for (int s = 0; s < n; ++s)
        for (auto [t, p] : P.rows[s]) muP[t] += res.mu[s] * p;
    for (int v = 0; v < n; ++v)
        res.residual = std::max(res.residual, std::fabs(muP[v] - res.mu[v]));
    if (res.residual > 1e-10)
        throw std::runtime_error("stationary_distribution: residual above 1e-10");
    return res;
}

double optimal_mass(const std::vector<double>& mu, const chain_space& space) {
    const game_definition& g = *space.game;
    double best = -kInf;
    for (std::size_t s = 0; s < space.states.size(); ++s)
        if (space.is_diag(static_cast<int>(s)))
            best = std::max(best, g.potential(space.states[s].curr));
    double mass = 0.0;
    for (std::size_t s = 0; s < space.states.size(); ++s)
        if (space.is_diag(static_cast<int>(s)) &&
            g.potential(space.states[s].curr) == best)
            mass += mu[s];
    return mass;
}

void export_resistance_graph_csv(const resistance_graph& rg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "from,to,min_resistance,single_weight\n";
    for (std::size_t d = 0; d < rg.node.size(); ++d)
        for (std::size_t e = 0; e < rg.node.size(); ++e) {
            if (d == e) continue;
            out << d << ',' << e << ',' << format_double(rg.min_resistance[d][e])
                << ',' << format_double(rg.single_weight[d][e]) << '\n';
        }
}

void export_stationary_csv(const chain_space& space, const std::vector<double>& mu,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "state,prev,curr,diag,mu\n";
    for (std::size_t s = 0; s < space.states.size(); ++s) {
        out << s << ',';
        const chain_state& z = space.states[s];
        for (std::size_t i = 0; i < z.prev.size(); ++i)
            out << (i ? " " : "") << z.prev[i];
        out << ',';
        for (std::size_t i = 0; i < z.curr.size(); ++i)
            out << (i ? " " : "") << z.curr[i];
        out << ',' << (space.is_diag(static_cast<int>(s)) ? 1 : 0) << ','
            << format_double(mu[s]) << '\n';
    }
}

} // namespace pipip
