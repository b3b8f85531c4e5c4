#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pipip/chain.hpp"
#include "pipip/config.hpp"
#include "pipip/harness.hpp"
#include "pipip/toy_games.hpp"

namespace {

using namespace pipip;

int cmd_run(const std::string& config_path, const std::string& preset,
            const std::string& seeds_flag, int horizon_flag,
            const std::string& algorithm_flag, const std::string& out_flag,
            int threads_flag) {
    if (config_path.empty() == preset.empty()) {
        std::cerr << "error: pass exactly one of a config path or --preset\n";
        return 1;
    }

    experiment_config config;
    if (!preset.empty()) {
        config = preset_by_name(preset);
    } else {
        std::ifstream f(config_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot open config '" << config_path << "'\n";
            return 1;
        }
        std::stringstream buffer;
        buffer << f.rdbuf();
        config = parse_config(buffer.str());
    }

    if (!seeds_flag.empty()) config.seeds = parse_seed_list(seeds_flag);
    if (horizon_flag >= 0) config.horizon = horizon_flag;
    if (!algorithm_flag.empty()) config.algorithm = algorithm_from_name(algorithm_flag);
    if (!out_flag.empty()) config.out_dir = out_flag;
    if (threads_flag >= 0) config.threads = threads_flag;

    run_summary s = run_experiment(config);
    std::cout << aggregate({s}).render();
    std::cout << "wrote " << s.seeds.size() << " trace files and summary_"
              << s.algorithm << ".txt to " << config.out_dir << "\n";
    return 0;
}

int cmd_analyze(const std::string& dir) {
    std::vector<run_summary> arms;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.rfind("summary_", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".txt")
            arms.push_back(read_summary(entry.path().string()));
    }
    if (arms.empty()) {
        std::cerr << "error: no summary_*.txt files under '" << dir << "'\n";
        return 1;
    }
    std::sort(arms.begin(), arms.end(),
              [](const run_summary& a, const run_summary& b) {
                  return a.algorithm < b.algorithm;
              });
    std::cout << aggregate(arms).render();
    return 0;
}

bool report(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
    return ok;
}

int cmd_verify() {
    bool all_ok = true;
    struct named_game {
        const char* name;
        game_definition g;
    };
    std::vector<named_game> games;
    games.push_back({"line_walk", toys::line_walk()});
    games.push_back({"coordination_2x2", toys::coordination_2x2()});
    games.push_back({"coordination_3x3", toys::coordination_3x3()});

    for (const auto& [name, g] : games) {
        chain_space space = state_space_B(g);

        // unperturbed recurrence: every class one diagonal state, all present
        std::string detail;
        bool ok = true;
        size_t diag = 0;
        for (size_t s = 0; s < space.states.size(); ++s)
            if (space.is_diag(static_cast<int>(s))) ++diag;
        try {
            auto classes = recurrent_classes_unperturbed(space);
            ok = classes.size() == diag;
            detail = std::to_string(classes.size()) + " singleton classes over " +
                     std::to_string(diag) + " diagonal states";
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        all_ok &= report(ok, std::string(name) + " unperturbed recurrence", detail);

        // straight-route weights sit in [1, 2)
        resistance_graph rg = min_resistance_paths(space);
        bool weights_ok = true;
        double wmin = 2.0, wmax = 0.0;
        for (const auto& row : rg.single_weight)
            for (double w : row)
                if (std::isfinite(w)) {
                    weights_ok &= (w >= 1.0 && w < 2.0);
                    wmin = std::min(wmin, w);
                    wmax = std::max(wmax, w);
                }
        std::ostringstream wd;
        wd << "range [" << wmin << ", " << wmax << "]";
        all_ok &= report(weights_ok, std::string(name) + " deviation weights", wd.str());

        // minimizers of the stochastic potential are potential maximizers
        potential_table pt = stochastic_potentials(g);
        double gmin = *std::min_element(pt.gamma.begin(), pt.gamma.end());
        double phi_best = g.potential(optimal_nash(g).front());
        bool argmin_ok = true;
        for (size_t i = 0; i < pt.node.size(); ++i)
            if (pt.gamma[i] == gmin && g.potential(pt.node[i]) != phi_best)
                argmin_ok = false;
        all_ok &= report(argmin_ok, std::string(name) + " stochastic potential argmin",
                         "min gamma = " + std::to_string(gmin));
    }

    // stationary mass concentrates on the best profile as the rate drops
    for (const auto* name : {"coordination_2x2", "coordination_3x3"}) {
        game_definition g = std::string(name) == "coordination_2x2"
                                ? toys::coordination_2x2()
                                : toys::coordination_3x3();
        chain_space space = state_space_B(g);
        double last = 0.0;
        bool monotone = true;
        for (double eps : {0.1, 0.05, 0.02, 0.01}) {
            double mass = optimal_mass(stationary_distribution(space, eps, 0.5).mu, space);
            monotone &= mass >= last;
            last = mass;
        }
        std::ostringstream md;
        md << "mass(0.01) = " << last;
        all_ok &= report(monotone && last > 0.9,
                         std::string(name) + " stationary concentration", md.str());
    }

    // reversal identity along two fixed routes
    {
        game_definition g3 = toys::coordination_3x3();
        route_reversal_result r = route_reversal_check({{0, 0}, {0, 1}, {1, 1}}, g3);
        double gap = std::abs(r.lambda_forward - r.lambda_reverse - r.potential_gap);
        game_definition gl = toys::line_walk();
        route_reversal_result rl = route_reversal_check({{0}, {1}, {2}, {4}}, gl);
        double gapl = std::abs(rl.lambda_forward - rl.lambda_reverse - rl.potential_gap);
        std::ostringstream rd;
        rd << "residuals " << gap << ", " << gapl;
        all_ok &= report(gap <= 1e-9 && gapl <= 1e-9, "route reversal identity", rd.str());
    }

    std::cout << (all_ok ? "verification passed\n" : "verification FAILED\n");
    return all_ok ? 0 : 1;
}

int cmd_presets(const std::string& name, const std::string& out_path) {
    if (name.empty()) {
        for (const std::string& p : preset_names()) std::cout << p << "\n";
        return 0;
    }
    std::string text = emit_config(preset_by_name(name));
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return 1;
        }
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained potential-game learning: experiments and certification"};
    app.require_subcommand(1);

    std::string config_path, preset, seeds_flag, algorithm_flag, out_flag;
    int horizon_flag = -1, threads_flag = -1;
    CLI::App* run = app.add_subcommand("run", "run a config-driven experiment batch");
    run->add_option("config", config_path, "config file path");
    run->add_option("--preset", preset, "built-in preset instead of a file");
    run->add_option("--seeds", seeds_flag, "override seeds (lo..hi or comma list)");
    run->add_option("--horizon", horizon_flag, "override horizon");
    run->add_option("--algorithm", algorithm_flag, "override algorithm: pipip|phpip|disl");
    run->add_option("--out", out_flag, "override output directory");
    run->add_option("--threads", threads_flag, "override worker count (0 = hardware)");

    std::string analyze_dir;
    CLI::App* analyze =
        app.add_subcommand("analyze", "aggregate summary files under a directory");
    analyze->add_option("dir", analyze_dir, "directory to scan")->required();

    app.add_subcommand("verify", "certify the learning chain on built-in games");

    std::string preset_name, preset_out;
    CLI::App* presets =
        app.add_subcommand("presets", "list built-in configs or emit one");
    presets->add_option("--name", preset_name, "preset to emit");
    presets->add_option("--out", preset_out, "write the preset to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run"))
            return cmd_run(config_path, preset, seeds_flag, horizon_flag,
                           algorithm_flag, out_flag, threads_flag);
        if (app.got_subcommand("analyze")) return cmd_analyze(analyze_dir);
        if (app.got_subcommand("verify")) return cmd_verify();
        if (app.got_subcommand("presets")) return cmd_presets(preset_name, preset_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
