#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pipip/coverage.hpp"
#include "pipip/game.hpp"
#include "pipip/toy_games.hpp"

using namespace pipip;

namespace {

game_definition grid3_uniform(int n_agents) {
    coverage_world w;
    w.grid.width = 3;
    w.grid.height = 3;
    return build_coverage_game(w, n_agents).game();
}

bool contains_joint(const std::vector<joint_action>& set, const joint_action& a) {
    return std::find(set.begin(), set.end(), a) != set.end();
}

} // namespace

TEST_CASE("restricted actions on a 3x3 king grid") {
    coverage_world w;
    w.grid.width = 3;
    w.grid.height = 3;
    coverage_game cg = build_coverage_game(w, 1);
    const game_definition& g = cg.game();

    int corner = cg.cell_action(0);     // cell (0,0)
    int center = cg.cell_action(4);     // cell (1,1)
    CHECK(restricted_actions(g, 0, corner).size() == 4);
    CHECK(restricted_actions(g, 0, center).size() == 9);

    // staying put is an allowed move
    CHECK(std::find(restricted_actions(g, 0, corner).begin(),
                    restricted_actions(g, 0, corner).end(),
                    corner) != restricted_actions(g, 0, corner).end());

    CHECK_THROWS_AS(restricted_actions(g, 1, 0), std::out_of_range);
    CHECK_THROWS_AS(restricted_actions(g, 0, 99), std::out_of_range);
}

TEST_CASE("restricted actions returns the stored map verbatim") {
    game_definition g;
    g.n_agents = 1;
    g.n_actions = {3};
    g.reachable = {{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}};
    g.utility = [](int, const joint_action&) { return 0.0; };
    CHECK(restricted_actions(g, 0, 1) == std::vector<action_id>{0, 1, 2});
}

TEST_CASE("assumption 1 passes on king grids and the toys") {
    CHECK(check_assumption1(grid3_uniform(1)).pass);
    CHECK(check_assumption1(toys::line_walk()).pass);
    CHECK(check_assumption1(toys::coordination_3x3()).pass);
}

TEST_CASE("assumption 1 flags small reachable sets with a witness") {
    game_definition g;
    g.n_agents = 1;
    g.n_actions = {2};
    g.reachable = {{{0, 1}, {0, 1}}};
    g.utility = [](int, const joint_action&) { return 0.0; };

    assumption_report rep = check_assumption1(g);
    CHECK_FALSE(rep.pass);
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(rep.witnesses.front().agent == 0);
    CHECK(rep.witnesses.front().from == 0);
    bool size_clause = false;
    for (const auto& c : rep.failed_clauses)
        size_clause |= c.find("size") != std::string::npos;
    CHECK(size_clause);
}

TEST_CASE("assumption 1 flags asymmetric edges") {
    // 0 can reach 1 but 1 cannot reach 0; every other clause holds
    game_definition g;
    g.n_agents = 1;
    g.n_actions = {4};
    g.reachable = {{{0, 1, 2}, {1, 2, 3}, {0, 1, 2, 3}, {1, 2, 3}}};
    g.utility = [](int, const joint_action&) { return 0.0; };

    assumption_report rep = check_assumption1(g);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.failed_clauses.size() == 1);
    CHECK(rep.failed_clauses.front() == "reversibility");
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(rep.witnesses.front().from == 0);
    CHECK(rep.witnesses.front().to == 1);
}

TEST_CASE("assumption 1 flags disconnected graphs") {
    game_definition g;
    g.n_agents = 1;
    g.n_actions = {6};
    g.reachable = {{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {3, 4, 5}, {3, 4, 5}, {3, 4, 5}}};
    g.utility = [](int, const joint_action&) { return 0.0; };
    assumption_report rep = check_assumption1(g);
    CHECK_FALSE(rep.pass);
    bool conn_clause = false;
    for (const auto& c : rep.failed_clauses)
        conn_clause |= c.find("connectivity") != std::string::npos;
    CHECK(conn_clause);
}

TEST_CASE("assumption 1 verdict is invariant under relabeling") {
    // swap action labels 0 and 2 of the line walk; the verdict must not move
    game_definition g = toys::line_walk();
    game_definition h = g;
    auto relabel = [](action_id a) { return a == 0 ? 2 : a == 2 ? 0 : a; };
    for (action_id a = 0; a < 5; ++a) {
        auto& set = h.reachable[0][relabel(a)];
        set.clear();
        for (action_id b : g.reachable[0][a]) set.push_back(relabel(b));
        std::sort(set.begin(), set.end());
    }
    CHECK(check_assumption1(g).pass == check_assumption1(h).pass);
}

TEST_CASE("assumption 2 on scaled coverage, constants, and a violator") {
    CHECK(check_assumption2(grid3_uniform(2)).pass);

    game_definition flat;
    flat.n_agents = 1;
    flat.n_actions = {3};
    flat.reachable = {{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}};
    flat.utility = [](int, const joint_action&) { return 0.7; };
    assumption_report rep = check_assumption2(flat);
    CHECK(rep.pass);
    CHECK(rep.worst == 0.0);

    game_definition bad;
    bad.n_agents = 1;
    bad.n_actions = {2};
    bad.reachable = {{{0, 1}, {0, 1}}};
    bad.utility = [](int, const joint_action& a) { return a[0] == 1 ? 1.5 : 0.0; };
    rep = check_assumption2(bad);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst == doctest::Approx(1.5));
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(rep.witnesses.front().from == 0);
    CHECK(rep.witnesses.front().to == 1);
    CHECK(rep.witnesses.front().value == doctest::Approx(1.5));
}

TEST_CASE("potential identity on coverage and identical-interest games") {
    assumption_report rep = verify_potential_identity(grid3_uniform(2), 1e-9);
    CHECK(rep.pass);
    CHECK(rep.worst <= 1e-12);

    rep = verify_potential_identity(toys::coordination_3x3(), 1e-9);
    CHECK(rep.pass);
    CHECK(rep.worst <= 1e-12);
}

TEST_CASE("potential identity detects an injected defect") {
    coverage_world w;
    w.grid.width = 3;
    w.grid.height = 3;
    coverage_game cg = build_coverage_game(w, 2);
    game_definition g = cg.game();
    auto clean = g.utility;
    g.utility = [clean](int i, const joint_action& a) {
        double u = clean(i, a);
        if (i == 0 && a[0] == 4 && a[1] == 0) u += 0.1;
        return u;
    };
    assumption_report rep = verify_potential_identity(g, 1e-9);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("potential identity requires the potential oracle") {
    game_definition g;
    g.n_agents = 1;
    g.n_actions = {3};
    g.reachable = {{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}};
    g.utility = [](int, const joint_action&) { return 0.0; };
    CHECK_THROWS(verify_potential_identity(g));
}

TEST_CASE("nash enumeration on the unscaled 2x2 coordination game") {
    game_definition g = toys::coordination_2x2_unit();
    auto nash = enumerate_nash(g);
    REQUIRE(nash.size() == 2);
    CHECK(contains_joint(nash, {0, 0}));
    CHECK(contains_joint(nash, {1, 1}));

    auto best = optimal_nash(g);
    REQUIRE(best.size() == 1);
    CHECK(best.front() == joint_action{1, 1});
}

TEST_CASE("constant games make every joint action an equilibrium") {
    game_definition g;
    g.n_agents = 2;
    g.n_actions = {2, 2};
    g.reachable = {{{0, 1}, {0, 1}}, {{0, 1}, {0, 1}}};
    g.utility = [](int, const joint_action&) { return 0.3; };
    g.potential = [](const joint_action&) { return 0.3; };
    CHECK(enumerate_nash(g).size() == 4);
    CHECK(optimal_nash(g).size() == 4);
}

TEST_CASE("single-agent line with increasing utility has the endpoint as nash") {
    game_definition g;
    g.n_agents = 1;
    g.n_actions = {3};
    g.reachable = {{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}};
    g.utility = [](int, const joint_action& a) { return 0.1 * (a[0] + 1); };
    g.potential = [](const joint_action& a) { return 0.1 * (a[0] + 1); };
    auto nash = enumerate_nash(g);
    REQUIRE(nash.size() == 1);
    CHECK(nash.front() == joint_action{2});
}

TEST_CASE("line walk equilibria respect the movement constraints") {
    game_definition g = toys::line_walk();
    auto nash = enumerate_nash(g);
    REQUIRE(nash.size() == 1);
    CHECK(nash.front() == joint_action{4});
    CHECK(optimal_nash(g) == nash);
}

TEST_CASE("single agent on a gaussian corner world seeks the densest cells") {
    coverage_world w;
    w.grid.width = 3;
    w.grid.height = 3;
    w.density.kind = density_kind::gaussian; // mean (1.95, 1.35) lies beyond
                                             // this small grid's corner
    coverage_game cg = build_coverage_game(w, 1);
    auto best = optimal_nash(cg.game());
    REQUIRE(best.size() == 1);
    CHECK(best.front() == joint_action{cg.cell_action(8)}); // cell (2,2)
}

TEST_CASE("optimal equilibria are always equilibria on potential games") {
    for (const game_definition& g :
         {toys::line_walk(), toys::coordination_2x2(), toys::coordination_3x3()}) {
        auto nash = enumerate_nash(g);
        for (const joint_action& a : optimal_nash(g))
            CHECK(contains_joint(nash, a));
    }
}

TEST_CASE("equilibrium sets ignore constant utility shifts") {
    game_definition g = toys::coordination_3x3();
    game_definition shifted = g;
    auto base = g.utility;
    shifted.utility = [base](int i, const joint_action& a) { return base(i, a) + 5.0; };
    CHECK(enumerate_nash(g) == enumerate_nash(shifted));
    CHECK(optimal_nash(g) == optimal_nash(shifted));
}

TEST_CASE("joint action indexing round-trips") {
    game_definition g = toys::coordination_3x3();
    CHECK(joint_action_count(g) == 9);
    for (std::uint64_t idx = 0; idx < 9; ++idx)
        CHECK(joint_index(g, joint_from_index(g, idx)) == idx);
    CHECK(enumerate_joint_actions(g).size() == 9);

    CHECK(joint_action_count(toys::coordination_2x2()) == 4);
    CHECK(joint_action_count(toys::line_walk()) == 5);
}

TEST_CASE("enumeration guard rejects oversized games") {
    game_definition g = toys::coordination_3x3();
    CHECK_THROWS_AS(enumerate_joint_actions(g, 4), std::length_error);
    CHECK_THROWS_AS(enumerate_nash(g, 4), std::length_error);
}
