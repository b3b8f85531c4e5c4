#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pipip/game.hpp"

namespace pipip {

struct grid_spec {
    int width = 9;
    int height = 6;
    double side = 0.3;
    double origin = 0.15; // cell centers at origin + side*j, origin + side*l
    double sensing_radius = 0.3;

    bool operator==(const grid_spec&) const = default;
};

enum class density_kind { uniform, gaussian, moving_gaussian, tabulated };

// Mean path for the moving density: parked at (from) through t_start, linear
// to (to) strictly inside (t_start, t_end), parked at (to) from t_end on.
struct moving_schedule {
    double from_x = 0.45, from_y = 0.45;
    double to_x = 1.95, to_y = 1.35;
    int t_start = 300, t_end = 700;

    bool operator==(const moving_schedule&) const = default;
};

struct density_field {
    density_kind kind = density_kind::uniform;
    double mean_x = 1.95, mean_y = 1.35; // gaussian
    moving_schedule schedule;            // moving_gaussian
    std::vector<double> table;           // tabulated, row-major, w*h entries
    double shape = 25.0 / 9.0;           // exponent coefficient of the gaussian

    // unscaled density at a point; t only matters for the moving kind
    double raw(double x, double y, int t, const grid_spec& grid) const;
    // least upper bound over all t, used for the deviation-bound scaling
    double sup_raw(double x, double y, const grid_spec& grid) const;
    void mean_at(int t, double& mx, double& my) const;

    bool operator==(const density_field&) const = default;
};

struct coverage_world {
    grid_spec grid;
    density_field density;
    std::vector<std::pair<int, int>> obstacles; // (j, l) cells removed from actions
    double scale_margin = 0.01;

    bool operator==(const coverage_world&) const = default;
};

// The assembled game. Action ids are dense over standable cells; cell ids
// run row-major over the full grid (obstacle cells keep their ids because
// they are still sensed and still carry density).
class coverage_game {
public:
    struct data; // definition lives in the implementation file

    const game_definition& game() const { return game_; }
    const coverage_world& world() const;
    double scale() const;
    int n_agents() const;
    bool time_varying() const;

    int n_cells() const;
    int n_standable() const;
    int action_cell(action_id a) const;          // action -> full-grid cell id
    int cell_action(int cell) const;             // -1 for obstacle cells
    const std::vector<int>& sensing_set(action_id a) const; // cell ids
    void cell_center(int cell, double& x, double& y) const;

    double density_at(int cell, int t) const;    // scaled
    int coverage_count(const joint_action& a, int cell) const;
    double coverage_potential(const joint_action& a, int t) const;
    double coverage_utility(int agent, const joint_action& a, int t) const;
    int diameter() const;

private:
    friend coverage_game build_coverage_game(const coverage_world&, int);
    std::shared_ptr<const data> d_;
    game_definition game_;
};

// Scale s such that no single move can change a utility by 1 or more:
// s = (1 - margin) / U_max with U_max the largest possible single-agent
// utility (max over standable cells of the summed sensed density, using the
// per-cell supremum over time for moving densities). Degenerate zero density
// gives s = 1.
double scale_for_assumption2(const coverage_world& world);

// Builds action sets (standable cells), king-move reachability, sensing
// tables and the scaled utility/potential oracles. Throws if obstacles
// disconnect the grid or shrink any reachable set below 3.
coverage_game build_coverage_game(const coverage_world& world, int n_agents);

// Greedy estimate of max_a phi: place agents one at a time, each on the cell
// that maximizes the potential so far. Used as the success-rate denominator.
double greedy_optimum(const coverage_game& cg, int t = 0);

// Exhaustive best single-cluster placement: max of phi over all 2x2 blocks
// of standable cells (agent count must be 4). Tracks the instantaneous
// optimum for the moving density.
double best_block_potential(const coverage_game& cg, int t);

} // namespace pipip
