#include "pipip/toy_games.hpp"

namespace pipip::toys {

// Identical-interest game from a dense potential table (joint_index order).
static game_definition identical_interest(
    std::vector<int> n_actions,
    std::vector<std::vector<std::vector<action_id>>> reachable,
    std::vector<double> table) {
    game_definition g;
    g.n_agents = static_cast<int>(n_actions.size());
    g.n_actions = std::move(n_actions);
    g.reachable = std::move(reachable);
    auto lookup = [table = std::move(table), sizes = g.n_actions](const joint_action& a) {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < sizes.size(); ++i)
            idx = idx * sizes[i] + a[i];
        return table[idx];
    };
    g.potential = lookup;
    g.utility = [lookup](int, const joint_action& a) { return lookup(a); };
    return g;
}

game_definition line_walk() {
    std::vector<std::vector<action_id>> reach = {
        {0, 1, 2}, {0, 1, 2, 3}, {0, 1, 2, 3, 4}, {1, 2, 3, 4}, {2, 3, 4}};
    return identical_interest({5}, {reach}, {0.2, 0.1, 0.3, 0.25, 0.4});
}

game_definition coordination_2x2() {
    std::vector<std::vector<action_id>> reach = {{0, 1}, {0, 1}};
    return identical_interest({2, 2}, {reach, reach},
                              {0.02, 0.0, 0.0, 0.98});
}

game_definition coordination_3x3() {
    std::vector<std::vector<action_id>> reach = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
    std::vector<double> table(9, 0.0);
    table[0] = table[4] = table[8] = 0.98;
    return identical_interest({3, 3}, {reach, reach}, std::move(table));
}

game_definition coordination_2x2_unit() {
    std::vector<std::vector<action_id>> reach = {{0, 1}, {0, 1}};
    return identical_interest({2, 2}, {reach, reach}, {1.0, 0.0, 0.0, 2.0});
}

game_definition line3() {
    std::vector<std::vector<action_id>> reach = {{0, 1}, {0, 1, 2}, {1, 2}};
    return identical_interest({3}, {reach}, {0.0, 0.1, 0.2});
}

} // namespace pipip::toys
