#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pipip/coverage.hpp"
#include "pipip/rng.hpp"

using namespace pipip;

namespace {

coverage_world grid3_world() {
    coverage_world w;
    w.grid.width = 3;
    w.grid.height = 3;
    return w; // uniform density
}

coverage_world exp1_world() {
    coverage_world w; // 9x6 defaults
    w.density.kind = density_kind::gaussian;
    w.obstacles = {{2, 4}, {3, 3}, {4, 2}, {5, 1}};
    return w;
}

coverage_world exp2_world() {
    coverage_world w = exp1_world();
    w.density.kind = density_kind::moving_gaussian;
    return w;
}

} // namespace

TEST_CASE("cell geometry and action numbering") {
    coverage_game cg = build_coverage_game(exp1_world(), 4);
    CHECK(cg.n_cells() == 54);
    CHECK(cg.n_standable() == 50);
    CHECK(cg.game().n_actions[0] == 50);

    double x = 0.0, y = 0.0;
    cg.cell_center(5 * 9 + 8, x, y); // top-right corner cell
    CHECK(x == doctest::Approx(2.55));
    CHECK(y == doctest::Approx(1.65));

    // obstacle cells keep their grid ids but carry no action
    CHECK(cg.cell_action(4 * 9 + 2) == -1);
    CHECK(cg.cell_action(3 * 9 + 3) == -1);
    for (action_id a = 0; a < cg.n_standable(); ++a)
        CHECK(cg.cell_action(cg.action_cell(a)) == a);
}

TEST_CASE("sensing sets follow the disk radius") {
    coverage_game cg = build_coverage_game(grid3_world(), 2);
    // radius = cell side: the cell itself plus its orthogonal neighbors
    CHECK(cg.sensing_set(cg.cell_action(4)).size() == 5); // interior
    CHECK(cg.sensing_set(cg.cell_action(0)).size() == 3); // corner
    CHECK(cg.sensing_set(cg.cell_action(1)).size() == 4); // edge
    for (action_id a = 0; a < cg.n_standable(); ++a) {
        const auto& s = cg.sensing_set(a);
        CHECK(std::is_sorted(s.begin(), s.end()));
        // standing cell always senses itself
        CHECK(std::find(s.begin(), s.end(), cg.action_cell(a)) != s.end());
    }

    coverage_world tiny = grid3_world();
    tiny.grid.sensing_radius = 0.0;
    coverage_game cg0 = build_coverage_game(tiny, 1);
    for (action_id a = 0; a < cg0.n_standable(); ++a)
        CHECK(cg0.sensing_set(a).size() == 1);

    // obstacle cells are still sensed by standable neighbors
    coverage_game cge = build_coverage_game(exp1_world(), 4);
    const auto& near = cge.sensing_set(cge.cell_action(3 * 9 + 2));
    CHECK(std::find(near.begin(), near.end(), 4 * 9 + 2) != near.end());
}

TEST_CASE("coverage counts agents whose disks hold a cell") {
    coverage_game cg = build_coverage_game(grid3_world(), 2);
    action_id center = cg.cell_action(4);
    CHECK(cg.coverage_count({center, center}, 4) == 2);
    CHECK(cg.coverage_count({cg.cell_action(0), cg.cell_action(0)}, 8) == 0);

    coverage_game cge = build_coverage_game(exp1_world(), 4);
    joint_action initial{cge.cell_action(0), cge.cell_action(9),
                         cge.cell_action(1), cge.cell_action(10)};
    CHECK(cge.coverage_count(initial, 0) == 3); // diagonal neighbor misses
}

TEST_CASE("potential stacks diminishing returns per covered cell") {
    coverage_game cg = build_coverage_game(grid3_world(), 2);
    double s = cg.scale();
    action_id center = cg.cell_action(4);

    CHECK(cg.coverage_potential({}, 0) == 0.0);
    CHECK(cg.coverage_potential({center}, 0) == doctest::Approx(5.0 * s));
    CHECK(cg.coverage_potential({center, center}, 0) == doctest::Approx(7.5 * s));

    // symmetric in the agents and monotone in adding one
    coverage_game cge = build_coverage_game(exp1_world(), 4);
    rng_stream rng(5150, 0);
    for (int trial = 0; trial < 20; ++trial) {
        joint_action a(4);
        for (auto& ai : a) ai = rng.index(cge.n_standable());
        joint_action rev(a.rbegin(), a.rend());
        CHECK(cge.coverage_potential(a, 0) == cge.coverage_potential(rev, 0));
        joint_action head(a.begin(), a.begin() + 3);
        CHECK(cge.coverage_potential(head, 0) <= cge.coverage_potential(a, 0));
    }
}

TEST_CASE("utilities split each cell's worth evenly across its coverers") {
    coverage_game lone = build_coverage_game(grid3_world(), 1);
    action_id center = lone.cell_action(4);
    CHECK(lone.coverage_utility(0, {center}, 0) ==
          doctest::Approx(5.0 * lone.scale()));

    coverage_game cg = build_coverage_game(grid3_world(), 2);
    center = cg.cell_action(4);
    CHECK(cg.coverage_utility(0, {center, center}, 0) ==
          doctest::Approx(2.5 * cg.scale()));
    CHECK(cg.coverage_utility(1, {center, center}, 0) ==
          doctest::Approx(2.5 * cg.scale()));

    // summed utilities equal the total covered density
    coverage_game cge = build_coverage_game(exp1_world(), 4);
    rng_stream rng(62, 0);
    for (int trial = 0; trial < 10; ++trial) {
        joint_action a(4);
        for (auto& ai : a) ai = rng.index(cge.n_standable());
        double util_sum = 0.0;
        for (int i = 0; i < 4; ++i) util_sum += cge.coverage_utility(i, a, 0);
        double covered = 0.0;
        for (int c = 0; c < cge.n_cells(); ++c)
            if (cge.coverage_count(a, c) > 0) covered += cge.density_at(c, 0);
        CHECK(util_sum == doctest::Approx(covered).epsilon(1e-12));
    }
}

TEST_CASE("scaling pins the worst single-agent haul just under one") {
    CHECK(scale_for_assumption2(grid3_world()) == doctest::Approx(0.198));
    CHECK(scale_for_assumption2(exp1_world()) ==
          doctest::Approx(0.24057).epsilon(1e-3));
    CHECK(scale_for_assumption2(exp2_world()) ==
          doctest::Approx(0.21955).epsilon(1e-3));

    coverage_world dead = grid3_world();
    dead.density.kind = density_kind::tabulated;
    dead.density.table.assign(9, 0.0);
    CHECK(scale_for_assumption2(dead) == 1.0);

    // the deviation bound holds after scaling
    coverage_game cg = build_coverage_game(exp1_world(), 2);
    assumption_report rep = check_assumption2(cg.game());
    CHECK(rep.pass);
    CHECK(rep.worst < 1.0);
}

TEST_CASE("tabulated densities are invariant to a global rescale") {
    coverage_world a = grid3_world();
    a.density.kind = density_kind::tabulated;
    a.density.table = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    coverage_world b = a;
    for (double& v : b.density.table) v *= 3.0;

    coverage_game ga = build_coverage_game(a, 2);
    coverage_game gb = build_coverage_game(b, 2);
    CHECK(gb.scale() == doctest::Approx(ga.scale() / 3.0));
    for (action_id p = 0; p < ga.n_standable(); ++p)
        for (action_id q = 0; q < ga.n_standable(); ++q)
            CHECK(ga.coverage_potential({p, q}, 0) ==
                  doctest::Approx(gb.coverage_potential({p, q}, 0)).epsilon(1e-12));
}

TEST_CASE("gaussian density peaks on the mean cell") {
    coverage_game cg = build_coverage_game(exp1_world(), 4);
    double s = cg.scale();
    int peak = 4 * 9 + 6; // cell centered on the mean
    CHECK(cg.density_at(peak, 0) == doctest::Approx(s).epsilon(1e-9));
    for (int c = 0; c < cg.n_cells(); ++c)
        CHECK(cg.density_at(c, 0) <= cg.density_at(peak, 0) + 1e-15);
    // one cell over: exp(-shape * side^2)
    CHECK(cg.density_at(peak - 1, 0) / cg.density_at(peak, 0) ==
          doctest::Approx(std::exp(-0.25)).epsilon(1e-9));
}

TEST_CASE("moving density follows its schedule") {
    density_field f;
    f.kind = density_kind::moving_gaussian;
    double mx = 0.0, my = 0.0;

    f.mean_at(2, mx, my);
    CHECK(mx == doctest::Approx(0.45));
    CHECK(my == doctest::Approx(0.45));
    f.mean_at(300, mx, my);
    CHECK(mx == doctest::Approx(0.45));
    f.mean_at(500, mx, my);
    CHECK(mx == doctest::Approx(1.2));
    CHECK(my == doctest::Approx(0.9));
    f.mean_at(700, mx, my);
    CHECK(mx == doctest::Approx(1.95));
    CHECK(my == doctest::Approx(1.35));
    f.mean_at(5000, mx, my);
    CHECK(mx == doctest::Approx(1.95));
    CHECK(my == doctest::Approx(1.35));

    // while parked the field matches a static gaussian at the same mean
    coverage_game moving = build_coverage_game(exp2_world(), 4);
    coverage_world parked_world = exp1_world();
    parked_world.density.mean_x = 0.45;
    parked_world.density.mean_y = 0.45;
    coverage_game parked = build_coverage_game(parked_world, 4);
    double ratio = moving.density_at(0, 100) / parked.density_at(0, 0);
    CHECK(ratio == doctest::Approx(moving.scale() / parked.scale()).epsilon(1e-9));
    for (int c = 0; c < moving.n_cells(); ++c)
        CHECK(moving.density_at(c, 100) ==
              doctest::Approx(ratio * parked.density_at(c, 0)).epsilon(1e-9));
    CHECK(moving.time_varying());
    CHECK_FALSE(parked.time_varying());
}

TEST_CASE("grid builds reject broken worlds") {
    coverage_world w = exp1_world();
    w.obstacles.push_back({9, 0}); // outside the 9-wide grid
    CHECK_THROWS_AS(build_coverage_game(w, 4), std::invalid_argument);

    // pinching a corner leaves it fewer than 3 moves
    w = exp1_world();
    w.obstacles = {{1, 0}, {0, 1}};
    CHECK_THROWS_WITH_AS(build_coverage_game(w, 4),
                         "build_coverage_game: obstacles shrink a reachable "
                         "set below 3 actions",
                         std::runtime_error);

    // a two-column barrier keeps every reach big but splits the grid
    w = exp1_world();
    w.obstacles.clear();
    for (int l = 0; l < 6; ++l) {
        w.obstacles.push_back({3, l});
        w.obstacles.push_back({4, l});
    }
    CHECK_THROWS_WITH_AS(build_coverage_game(w, 4),
                         "build_coverage_game: obstacles disconnect the grid",
                         std::runtime_error);

    CHECK_THROWS_AS(build_coverage_game(exp1_world(), 0), std::invalid_argument);
}

TEST_CASE("movement graph is king moves over standable cells") {
    coverage_game cg = build_coverage_game(exp1_world(), 4);
    CHECK(cg.diameter() == 8);

    coverage_world plain = exp1_world();
    plain.obstacles.clear();
    CHECK(build_coverage_game(plain, 4).diameter() == 8);

    const game_definition& g = cg.game();
    assumption_report a1 = check_assumption1(g);
    CHECK(a1.pass);
    // moves of one cell in each direction, self included
    const auto& reach = restricted_actions(g, 0, cg.cell_action(0));
    CHECK(reach.size() == 4);
    const auto& mid = restricted_actions(g, 1, cg.cell_action(2 * 9 + 7));
    CHECK(mid.size() == 9);
    const auto& clipped = restricted_actions(g, 2, cg.cell_action(2 * 9 + 6));
    CHECK(clipped.size() == 8); // one king neighbor is an obstacle
}

TEST_CASE("potential identity holds for the assembled games") {
    coverage_game cg = build_coverage_game(grid3_world(), 2);
    assumption_report rep = verify_potential_identity(cg.game(), 1e-12);
    CHECK(rep.pass);

    coverage_world gauss = grid3_world();
    gauss.density.kind = density_kind::gaussian;
    gauss.density.mean_x = 0.45;
    gauss.density.mean_y = 0.45;
    rep = verify_potential_identity(build_coverage_game(gauss, 2).game(), 1e-12);
    CHECK(rep.pass);
}

TEST_CASE("greedy placement reproduces the frozen optimum estimate") {
    coverage_game cg = build_coverage_game(exp1_world(), 4);
    double greedy = greedy_optimum(cg);
    CHECK(greedy == doctest::Approx(2.52673).epsilon(1e-4));
    // the corner cluster sits far from the density peak and scores far lower
    joint_action initial{cg.cell_action(0), cg.cell_action(9), cg.cell_action(1),
                         cg.cell_action(10)};
    CHECK(cg.coverage_potential(initial, 0) < 0.1 * greedy);
}

TEST_CASE("block optimum scans every standable square") {
    coverage_game cg = build_coverage_game(exp1_world(), 4);
    const coverage_world& w = cg.world();

    for (int t : {0, 500}) {
        double best = 0.0;
        for (int l = 0; l + 1 < w.grid.height; ++l)
            for (int j = 0; j + 1 < w.grid.width; ++j) {
                int c00 = l * 9 + j, c10 = l * 9 + j + 1;
                int c01 = (l + 1) * 9 + j, c11 = (l + 1) * 9 + j + 1;
                if (cg.cell_action(c00) < 0 || cg.cell_action(c10) < 0 ||
                    cg.cell_action(c01) < 0 || cg.cell_action(c11) < 0)
                    continue;
                joint_action a{cg.cell_action(c00), cg.cell_action(c10),
                               cg.cell_action(c01), cg.cell_action(c11)};
                best = std::max(best, cg.coverage_potential(a, t));
            }
        CHECK(best_block_potential(cg, t) == doctest::Approx(best).epsilon(1e-12));
    }

    coverage_game two = build_coverage_game(exp1_world(), 2);
    CHECK_THROWS_AS(best_block_potential(two, 0), std::logic_error);
}
