#include "pipip/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pipip/num_format.hpp"
#include "pipip/trace.hpp"

namespace pipip {

namespace {

// learner knobs and output plumbing do not change which experiment this is
std::string arm_key_of(const experiment_config& c) {
    experiment_config n = c;
    n.algorithm = algorithm_kind::pipip;
    n.kappa = 0.5;
    n.constant_epsilon = true;
    n.epsilon = 0.15;
    n.out_dir.clear();
    n.threads = 0;
    return emit_config(n);
}

std::string seed_file_name(const std::string& label, std::uint64_t seed) {
    std::ostringstream name;
    name << "trace_" << label << "_seed" << std::setw(4) << std::setfill('0')
         << seed << ".csv";
    return name.str();
}

std::vector<std::pair<int, double>> pick_checkpoints(const episode_trace& t) {
    std::vector<std::pair<int, double>> out;
    size_t rows = t.step.size();
    if (rows == 0) return out;
    size_t prev = rows; // sentinel
    for (int k = 0; k < 10; ++k) {
        size_t idx = static_cast<size_t>(
            std::llround(k * (static_cast<double>(rows) - 1.0) / 9.0));
        if (idx == prev) continue;
        prev = idx;
        out.emplace_back(t.step[idx], t.potential[idx]);
    }
    return out;
}

} // namespace

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile p outside [0, 1]");
    std::sort(values.begin(), values.end());
    double h = p * (static_cast<double>(values.size()) - 1.0);
    size_t lo = static_cast<size_t>(h);
    double frac = h - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

run_summary run_batch(const game_definition& g, const learner_params& params,
                      const std::vector<std::uint64_t>& seeds, int horizon,
                      const joint_action& initial, int threads,
                      const std::string& out_dir, const std::string& label,
                      const std::string& arm_key, double optimum,
                      bool optimum_exact) {
    if (horizon < 2) throw std::invalid_argument("run_batch: horizon must be at least 2");
    if (seeds.empty()) throw std::invalid_argument("run_batch: no seeds");
    auto start = std::chrono::steady_clock::now();

    learner_params p = params;
    if (!p.constant_epsilon && p.diameter <= 0) p.diameter = diameter_D(g);

    // exact optimal set when the joint space is enumerable
    std::set<std::uint64_t> optimal_set;
    bool have_optimal_set = false;
    if (g.potential && joint_action_count(g) <= 200000) {
        double best = -std::numeric_limits<double>::infinity();
        for (const joint_action& a : enumerate_joint_actions(g, 200000)) {
            double v = g.potential(a);
            if (v > best) {
                best = v;
                optimal_set.clear();
            }
            if (v == best) optimal_set.insert(joint_index(g, a));
        }
        have_optimal_set = true;
    }

    run_summary summary;
    summary.algorithm = label;
    summary.arm_key = arm_key;
    summary.horizon = horizon;
    summary.agents = g.n_agents;
    summary.optimum = optimum;
    summary.optimum_exact = optimum_exact;
    summary.seeds.resize(seeds.size());

    int n_workers = threads > 0 ? threads
                                : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<int>(n_workers, static_cast<int>(seeds.size()));

    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            try {
                episode_trace t = run_episode(g, p, horizon - 1, seeds[i], initial);
                seed_result& r = summary.seeds[i];
                r.seed = seeds[i];
                r.final_potential = t.potential.back();
                r.checkpoints = pick_checkpoints(t);
                if (have_optimal_set) {
                    size_t hits = 0;
                    for (const joint_action& a : t.action)
                        hits += optimal_set.count(joint_index(g, a));
                    r.optimal_fraction =
                        static_cast<double>(hits) / static_cast<double>(t.action.size());
                }
                if (!out_dir.empty()) {
                    r.trace_file = seed_file_name(label, seeds[i]);
                    write_trace_csv(out_dir + "/" + r.trace_file, t);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

run_summary run_experiment(const experiment_config& config) {
    validate_config(config);
    coverage_game cg = build_coverage_game(config.world, config.agents);

    joint_action initial;
    for (auto [j, l] : config.initial)
        initial.push_back(cg.cell_action(l * config.world.grid.width + j));

    learner_params params;
    params.algo = config.algorithm;
    params.kappa = config.kappa;
    params.constant_epsilon = config.constant_epsilon;
    params.epsilon = config.epsilon;
    params.diameter = cg.diameter();

    double greedy = greedy_optimum(cg, config.horizon);

    std::filesystem::create_directories(config.out_dir);
    {
        std::ofstream f(config.out_dir + "/config.ini", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + config.out_dir + "/config.ini");
        std::string text = emit_config(config);
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
    }

    run_summary s = run_batch(cg.game(), params, config.seeds, config.horizon,
                              initial, config.threads, config.out_dir,
                              algorithm_name(config.algorithm), arm_key_of(config),
                              greedy, false);
    write_summary(config.out_dir + "/summary_" + algorithm_name(config.algorithm) +
                      ".txt",
                  s);
    return s;
}

void write_summary(const std::string& path, const run_summary& s) {
    std::string out;
    auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("algorithm", s.algorithm);
    kv("horizon", std::to_string(s.horizon));
    kv("agents", std::to_string(s.agents));
    kv("optimum", format_double(s.optimum));
    kv("optimum_kind", s.optimum_exact ? "exact" : "greedy");
    kv("seed_count", std::to_string(s.seeds.size()));
    kv("wall_seconds", format_double(s.wall_seconds));
    for (const seed_result& r : s.seeds) {
        std::string base = "seed." + std::to_string(r.seed) + ".";
        kv(base + "final_potential", format_double(r.final_potential));
        std::string cp;
        for (size_t i = 0; i < r.checkpoints.size(); ++i) {
            if (i) cp += ';';
            cp += std::to_string(r.checkpoints[i].first) + ':' +
                  format_double(r.checkpoints[i].second);
        }
        kv(base + "checkpoints", cp);
        kv(base + "optimal_fraction",
           r.optimal_fraction < 0.0 ? "na" : format_double(r.optimal_fraction));
        if (!r.trace_file.empty()) kv(base + "trace", r.trace_file);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write summary '" + path + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

run_summary read_summary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open summary '" + path + "'");

    run_summary s;
    std::vector<std::uint64_t> order;
    auto seed_slot = [&s, &order](std::uint64_t seed) -> seed_result& {
        for (size_t i = 0; i < order.size(); ++i)
            if (order[i] == seed) return s.seeds[i];
        order.push_back(seed);
        s.seeds.emplace_back();
        s.seeds.back().seed = seed;
        return s.seeds.back();
    };

    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t eq = line.find(" = ");
        if (eq == std::string::npos)
            throw std::runtime_error("summary line " + std::to_string(line_no) +
                                     ": expected 'key = value'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 3);

        if (key == "algorithm") s.algorithm = value;
        else if (key == "horizon") s.horizon = std::stoi(value);
        else if (key == "agents") s.agents = std::stoi(value);
        else if (key == "optimum") s.optimum = std::stod(value);
        else if (key == "optimum_kind") s.optimum_exact = (value == "exact");
        else if (key == "seed_count") { /* redundant with the seed entries */ }
        else if (key == "wall_seconds") s.wall_seconds = std::stod(value);
        else if (key.rfind("seed.", 0) == 0) {
            size_t dot = key.find('.', 5);
            if (dot == std::string::npos)
                throw std::runtime_error("summary: malformed key '" + key + "'");
            std::uint64_t seed = std::stoull(key.substr(5, dot - 5));
            std::string field = key.substr(dot + 1);
            seed_result& r = seed_slot(seed);
            if (field == "final_potential") r.final_potential = std::stod(value);
            else if (field == "checkpoints") {
                r.checkpoints.clear();
                if (!value.empty()) {
                    std::istringstream cp(value);
                    std::string item;
                    while (std::getline(cp, item, ';')) {
                        size_t colon = item.find(':');
                        if (colon == std::string::npos)
                            throw std::runtime_error("summary: malformed checkpoint '" +
                                                     item + "'");
                        r.checkpoints.emplace_back(std::stoi(item.substr(0, colon)),
                                                   std::stod(item.substr(colon + 1)));
                    }
                }
            }
            else if (field == "optimal_fraction")
                r.optimal_fraction = value == "na" ? -1.0 : std::stod(value);
            else if (field == "trace") r.trace_file = value;
            else throw std::runtime_error("summary: unknown field '" + field + "'");
        }
        else throw std::runtime_error("summary: unknown key '" + key + "'");
    }

    std::filesystem::path dir = std::filesystem::path(path).parent_path();
    std::filesystem::path cfg = dir / "config.ini";
    if (std::filesystem::exists(cfg)) {
        std::ifstream cf(cfg, std::ios::binary);
        std::stringstream buffer;
        buffer << cf.rdbuf();
        s.arm_key = arm_key_of(parse_config(buffer.str()));
    }
    return s;
}

comparison_report aggregate(const std::vector<run_summary>& arms) {
    if (arms.empty()) throw std::invalid_argument("aggregate: no arms");
    for (const run_summary& s : arms) {
        if (s.seeds.empty())
            throw std::invalid_argument("aggregate: arm '" + s.algorithm +
                                        "' has no seeds");
        if (s.arm_key != arms.front().arm_key || s.horizon != arms.front().horizon ||
            s.agents != arms.front().agents)
            throw std::invalid_argument(
                "aggregate: arms describe different experiments");
    }

    comparison_report report;
    for (const run_summary& s : arms) {
        std::vector<double> finals;
        int successes = 0;
        for (const seed_result& r : s.seeds) {
            finals.push_back(r.final_potential);
            if (r.final_potential >= 0.95 * s.optimum) ++successes;
        }
        arm_stats st;
        st.algorithm = s.algorithm;
        st.n_seeds = static_cast<int>(s.seeds.size());
        st.median_final = median(finals);
        st.q1_final = quantile(finals, 0.25);
        st.q3_final = quantile(finals, 0.75);
        st.success_rate = static_cast<double>(successes) / finals.size();
        st.optimum = s.optimum;
        st.optimum_exact = s.optimum_exact;
        report.arms.push_back(st);
    }
    return report;
}

std::string comparison_report::render() const {
    std::ostringstream out;
    out << std::left << std::setw(10) << "arm" << std::right << std::setw(8)
        << "seeds" << std::setw(14) << "median" << std::setw(14) << "q1"
        << std::setw(14) << "q3" << std::setw(10) << "success" << std::setw(14)
        << "optimum" << '\n';
    for (const arm_stats& a : arms) {
        out << std::left << std::setw(10) << a.algorithm << std::right
            << std::setw(8) << a.n_seeds << std::fixed << std::setprecision(5)
            << std::setw(14) << a.median_final << std::setw(14) << a.q1_final
            << std::setw(14) << a.q3_final << std::setprecision(2) << std::setw(10)
            << a.success_rate << std::setprecision(5) << std::setw(14) << a.optimum
            << (a.optimum_exact ? " (exact)" : " (greedy)") << '\n';
        out.unsetf(std::ios::fixed);
    }
    return out.str();
}

} // namespace pipip
