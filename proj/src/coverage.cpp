#include "pipip/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace pipip {

void density_field::mean_at(int t, double& mx, double& my) const {
    if (t <= schedule.t_start) {
        mx = schedule.from_x;
        my = schedule.from_y;
    } else if (t >= schedule.t_end) {
        mx = schedule.to_x;
        my = schedule.to_y;
    } else {
        double f = static_cast<double>(t - schedule.t_start) /
                   static_cast<double>(schedule.t_end - schedule.t_start);
        mx = schedule.from_x + f * (schedule.to_x - schedule.from_x);
        my = schedule.from_y + f * (schedule.to_y - schedule.from_y);
    }
}

static int nearest_cell(const grid_spec& grid, double x, double y) {
    int j = static_cast<int>(std::lround((x - grid.origin) / grid.side));
    int l = static_cast<int>(std::lround((y - grid.origin) / grid.side));
    j = std::clamp(j, 0, grid.width - 1);
    l = std::clamp(l, 0, grid.height - 1);
    return l * grid.width + j;
}

double density_field::raw(double x, double y, int t, const grid_spec& grid) const {
    switch (kind) {
    case density_kind::uniform:
        return 1.0;
    case density_kind::gaussian: {
        double dx = x - mean_x, dy = y - mean_y;
        return std::exp(-shape * (dx * dx + dy * dy));
    }
    case density_kind::moving_gaussian: {
        double mx, my;
        mean_at(t, mx, my);
        double dx = x - mx, dy = y - my;
        return std::exp(-shape * (dx * dx + dy * dy));
    }
    case density_kind::tabulated:
        return table[nearest_cell(grid, x, y)];
    }
    return 0.0;
}

double density_field::sup_raw(double x, double y, const grid_spec& grid) const {
    if (kind != density_kind::moving_gaussian) return raw(x, y, 0, grid);
    // the gaussian's sup along the mean path is attained at the nearest
    // point of the from-to segment
    double ax = schedule.from_x, ay = schedule.from_y;
    double bx = schedule.to_x, by = schedule.to_y;
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double f = len2 > 0.0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
    f = std::clamp(f, 0.0, 1.0);
    double px = ax + f * dx, py = ay + f * dy;
    double ex = x - px, ey = y - py;
    return std::exp(-shape * (ex * ex + ey * ey));
}

struct coverage_game::data {
    coverage_world world;
    int n_agents = 0;
    double scale = 1.0;
    int n_cells = 0;
    std::vector<double> cx, cy;
    std::vector<char> standable;
    std::vector<int> action_cell;
    std::vector<int> cell_action;
    std::vector<std::vector<int>> sense; // per cell, sorted cell ids
    std::vector<double> harmonic;        // harmonic[k] = sum_{l=1..k} 1/l
    int diameter = 0;

    double w_at(int cell, int t) const {
        return scale * world.density.raw(cx[cell], cy[cell], t, world.grid);
    }
};

namespace {

using cov_data = coverage_game::data;

std::shared_ptr<cov_data> make_tables(const coverage_world& world, int n_agents) {
    auto d = std::make_shared<cov_data>();
    d->world = world;
    d->n_agents = n_agents;
    const grid_spec& grid = world.grid;
    d->n_cells = grid.width * grid.height;

    d->cx.resize(d->n_cells);
    d->cy.resize(d->n_cells);
    d->standable.assign(d->n_cells, 1);
    for (int l = 0; l < grid.height; ++l)
        for (int j = 0; j < grid.width; ++j) {
            int c = l * grid.width + j;
            d->cx[c] = grid.origin + grid.side * j;
            d->cy[c] = grid.origin + grid.side * l;
        }
    for (auto [j, l] : world.obstacles) {
        if (j < 0 || j >= grid.width || l < 0 || l >= grid.height)
            throw std::invalid_argument("coverage: obstacle outside the grid");
        d->standable[l * grid.width + j] = 0;
    }

    // sensed cells: centers within the sensing radius, boundary inclusive.
    // The tiny slack absorbs roundoff when the radius equals the cell pitch
    // exactly (0.45-0.15 lands a hair above 0.3 in binary floating point).
    double r2 = grid.sensing_radius * grid.sensing_radius + 1e-9;
    d->sense.resize(d->n_cells);
    for (int c = 0; c < d->n_cells; ++c)
        for (int q = 0; q < d->n_cells; ++q) {
            double dx = d->cx[c] - d->cx[q], dy = d->cy[c] - d->cy[q];
            if (dx * dx + dy * dy <= r2) d->sense[c].push_back(q);
        }

    d->cell_action.assign(d->n_cells, -1);
    for (int c = 0; c < d->n_cells; ++c)
        if (d->standable[c]) {
            d->cell_action[c] = static_cast<int>(d->action_cell.size());
            d->action_cell.push_back(c);
        }

    d->harmonic.assign(n_agents + 1, 0.0);
    for (int k = 1; k <= n_agents; ++k)
        d->harmonic[k] = d->harmonic[k - 1] + 1.0 / k;

    // deviation-bound scale from the largest possible lone-agent utility
    double u_max = 0.0;
    for (int c : d->action_cell) {
        double total = 0.0;
        for (int q : d->sense[c])
            total += world.density.sup_raw(d->cx[q], d->cy[q], grid);
        u_max = std::max(u_max, total);
    }
    d->scale = (u_max > 0.0) ? (1.0 - world.scale_margin) / u_max : 1.0;
    return d;
}

// variable-length joints allowed so the greedy estimator can grow a profile
void count_sensing(const cov_data& d, const joint_action& a, std::vector<int>& n_q) {
    n_q.assign(d.n_cells, 0);
    for (action_id ai : a)
        for (int q : d.sense[d.action_cell[ai]]) ++n_q[q];
}

double eval_potential(const cov_data& d, const joint_action& a, int t) {
    std::vector<int> n_q;
    count_sensing(d, a, n_q);
    double total = 0.0;
    for (int q = 0; q < d.n_cells; ++q)
        if (n_q[q] > 0) total += d.w_at(q, t) * d.harmonic[n_q[q]];
    return total;
}

double eval_utility(const cov_data& d, int agent, const joint_action& a, int t) {
    std::vector<int> n_q;
    count_sensing(d, a, n_q);
    double total = 0.0;
    for (int q : d.sense[d.action_cell[a[agent]]])
        total += d.w_at(q, t) / n_q[q];
    return total;
}

} // namespace

const coverage_world& coverage_game::world() const { return d_->world; }
double coverage_game::scale() const { return d_->scale; }
int coverage_game::n_agents() const { return d_->n_agents; }
bool coverage_game::time_varying() const {
    return d_->world.density.kind == density_kind::moving_gaussian;
}
int coverage_game::n_cells() const { return d_->n_cells; }
int coverage_game::n_standable() const { return static_cast<int>(d_->action_cell.size()); }
int coverage_game::action_cell(action_id a) const { return d_->action_cell[a]; }
int coverage_game::cell_action(int cell) const { return d_->cell_action[cell]; }
const std::vector<int>& coverage_game::sensing_set(action_id a) const {
    return d_->sense[d_->action_cell[a]];
}
void coverage_game::cell_center(int cell, double& x, double& y) const {
    x = d_->cx[cell];
    y = d_->cy[cell];
}
double coverage_game::density_at(int cell, int t) const { return d_->w_at(cell, t); }
int coverage_game::coverage_count(const joint_action& a, int cell) const {
    std::vector<int> n_q;
    count_sensing(*d_, a, n_q);
    return n_q[cell];
}
double coverage_game::coverage_potential(const joint_action& a, int t) const {
    return eval_potential(*d_, a, t);
}
double coverage_game::coverage_utility(int agent, const joint_action& a, int t) const {
    return eval_utility(*d_, agent, a, t);
}
int coverage_game::diameter() const { return d_->diameter; }

double scale_for_assumption2(const coverage_world& world) {
    return make_tables(world, 1)->scale;
}

coverage_game build_coverage_game(const coverage_world& world, int n_agents) {
    if (n_agents < 1)
        throw std::invalid_argument("build_coverage_game: need at least one agent");
    auto d = make_tables(world, n_agents);
    const grid_spec& grid = world.grid;

    // king moves restricted to standable cells, expressed in action ids
    int n_act = static_cast<int>(d->action_cell.size());
    std::vector<std::vector<action_id>> reach(n_act);
    for (action_id a = 0; a < n_act; ++a) {
        int c = d->action_cell[a];
        int j = c % grid.width, l = c / grid.width;
        for (int dl = -1; dl <= 1; ++dl)
            for (int dj = -1; dj <= 1; ++dj) {
                int nj = j + dj, nl = l + dl;
                if (nj < 0 || nj >= grid.width || nl < 0 || nl >= grid.height)
                    continue;
                int nc = nl * grid.width + nj;
                if (d->standable[nc]) reach[a].push_back(d->cell_action[nc]);
            }
        std::sort(reach[a].begin(), reach[a].end());
        if (static_cast<int>(reach[a].size()) < 3)
            throw std::runtime_error("build_coverage_game: obstacles shrink a "
                                     "reachable set below 3 actions");
    }

    // all standable cells must stay mutually reachable
    std::vector<char> seen(n_act, 0);
    std::deque<action_id> queue{0};
    seen[0] = 1;
    int found = 1;
    while (!queue.empty()) {
        action_id a = queue.front();
        queue.pop_front();
        for (action_id b : reach[a])
            if (!seen[b]) {
                seen[b] = 1;
                ++found;
                queue.push_back(b);
            }
    }
    if (found != n_act)
        throw std::runtime_error("build_coverage_game: obstacles disconnect the grid");

    // graph diameter via all-pairs BFS (every agent shares the same graph)
    int diameter = 0;
    for (action_id src = 0; src < n_act; ++src) {
        std::vector<int> dist(n_act, -1);
        std::deque<action_id> bfs{src};
        dist[src] = 0;
        while (!bfs.empty()) {
            action_id a = bfs.front();
            bfs.pop_front();
            for (action_id b : reach[a])
                if (dist[b] < 0) {
                    dist[b] = dist[a] + 1;
                    bfs.push_back(b);
                }
        }
        for (action_id b = 0; b < n_act; ++b)
            diameter = std::max(diameter, dist[b]);
    }
    d->diameter = diameter;

    coverage_game cg;
    cg.d_ = d;
    cg.game_.n_agents = n_agents;
    cg.game_.n_actions.assign(n_agents, n_act);
    cg.game_.reachable.assign(n_agents, reach);
    std::shared_ptr<const cov_data> dd = d;
    cg.game_.utility = [dd](int i, const joint_action& a) {
        return eval_utility(*dd, i, a, 0);
    };
    cg.game_.potential = [dd](const joint_action& a) {
        return eval_potential(*dd, a, 0);
    };
    if (world.density.kind == density_kind::moving_gaussian) {
        cg.game_.utility_t = [dd](int i, const joint_action& a, int t) {
            return eval_utility(*dd, i, a, t);
        };
        cg.game_.potential_t = [dd](const joint_action& a, int t) {
            return eval_potential(*dd, a, t);
        };
    }
    return cg;
}

double greedy_optimum(const coverage_game& cg, int t) {
    joint_action placed;
    double value = 0.0;
    for (int k = 0; k < cg.n_agents(); ++k) {
        double best = -1.0;
        action_id pick = 0;
        placed.push_back(0);
        for (action_id b = 0; b < cg.n_standable(); ++b) {
            placed.back() = b;
            double v = cg.coverage_potential(placed, t);
            if (v > best) {
                best = v;
                pick = b;
            }
        }
        placed.back() = pick;
        value = best;
    }
    return value;
}

double best_block_potential(const coverage_game& cg, int t) {
    if (cg.n_agents() != 4)
        throw std::logic_error("best_block_potential: defined for 4 agents");
    const grid_spec& grid = cg.world().grid;
    double best = 0.0;
    for (int l = 0; l + 1 < grid.height; ++l)
        for (int j = 0; j + 1 < grid.width; ++j) {
            int c00 = l * grid.width + j;
            int c10 = c00 + 1;
            int c01 = c00 + grid.width;
            int c11 = c01 + 1;
            joint_action block;
            bool ok = true;
            for (int c : {c00, c10, c01, c11}) {
                int a = cg.cell_action(c);
                if (a < 0) {
                    ok = false;
                    break;
                }
                block.push_back(a);
            }
            if (!ok) continue;
            best = std::max(best, cg.coverage_potential(block, t));
        }
    return best;
}

} // namespace pipip
