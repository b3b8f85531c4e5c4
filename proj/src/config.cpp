#include "pipip/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pipip/num_format.hpp"

namespace pipip {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    if (line > 0)
        throw std::runtime_error("config line " + std::to_string(line) + ": " + what);
    throw std::runtime_error("config: " + what);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != ' ' && ch != '\t') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int(const std::string& v, int line) {
    int x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        fail(line, "expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, int line) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        fail(line, "expected a nonnegative integer, got '" + v + "'");
    return x;
}

double parse_double(const std::string& v, int line) {
    try {
        size_t idx = 0;
        double x = std::stod(v, &idx);
        if (idx != v.size()) fail(line, "trailing characters after number '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        fail(line, "expected a number, got '" + v + "'");
    } catch (const std::out_of_range&) {
        fail(line, "number out of range: '" + v + "'");
    }
}

std::vector<std::pair<int, int>> parse_cells(const std::string& v, int line) {
    std::vector<std::pair<int, int>> out;
    if (v == "none") return out;
    for (const std::string& item : split(v, ';')) {
        auto parts = split(item, ',');
        if (parts.size() != 2)
            fail(line, "expected 'j,l' pairs separated by ';', got '" + item + "'");
        out.emplace_back(parse_int(parts[0], line), parse_int(parts[1], line));
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& v, int line) {
    std::vector<std::uint64_t> out;
    size_t dots = v.find("..");
    if (dots != std::string::npos) {
        std::uint64_t lo = parse_u64(trim(v.substr(0, dots)), line);
        std::uint64_t hi = parse_u64(trim(v.substr(dots + 2)), line);
        if (hi < lo) fail(line, "seed range upper bound below lower bound");
        if (hi - lo >= 1000000) fail(line, "seed range too large");
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    for (const std::string& item : split(v, ','))
        out.push_back(parse_u64(item, line));
    return out;
}

std::vector<double> parse_doubles(const std::string& v, int line) {
    std::vector<double> out;
    for (const std::string& item : split(v, ','))
        out.push_back(parse_double(item, line));
    return out;
}

std::string emit_cells(const std::vector<std::pair<int, int>>& cells) {
    if (cells.empty()) return "none";
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(cells[i].first) + ',' + std::to_string(cells[i].second);
    }
    return out;
}

std::string emit_seeds(const std::vector<std::uint64_t>& seeds) {
    bool contiguous = seeds.size() >= 2;
    for (size_t i = 1; i < seeds.size() && contiguous; ++i)
        contiguous = seeds[i] == seeds[i - 1] + 1;
    if (contiguous)
        return std::to_string(seeds.front()) + ".." + std::to_string(seeds.back());
    std::string out;
    for (size_t i = 0; i < seeds.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(seeds[i]);
    }
    return out;
}

const char* density_name(density_kind k) {
    switch (k) {
    case density_kind::uniform: return "uniform";
    case density_kind::gaussian: return "gaussian";
    case density_kind::moving_gaussian: return "moving_gaussian";
    case density_kind::tabulated: return "tabulated";
    }
    return "?";
}

density_kind density_from_name(const std::string& v, int line) {
    if (v == "uniform") return density_kind::uniform;
    if (v == "gaussian") return density_kind::gaussian;
    if (v == "moving_gaussian") return density_kind::moving_gaussian;
    if (v == "tabulated") return density_kind::tabulated;
    fail(line, "unknown density '" + v + "'");
}

} // namespace

const char* algorithm_name(algorithm_kind k) {
    switch (k) {
    case algorithm_kind::pipip: return "pipip";
    case algorithm_kind::phpip: return "phpip";
    case algorithm_kind::disl: return "disl";
    }
    return "?";
}

algorithm_kind algorithm_from_name(const std::string& name) {
    if (name == "pipip") return algorithm_kind::pipip;
    if (name == "phpip") return algorithm_kind::phpip;
    if (name == "disl") return algorithm_kind::disl;
    throw std::runtime_error("unknown algorithm '" + name + "'");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    return parse_seeds(trim(text), 0);
}

experiment_config default_config() {
    experiment_config c;
    for (std::uint64_t s = 1; s <= 50; ++s) c.seeds.push_back(s);
    c.initial = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    return c;
}

experiment_config parse_config(const std::string& text) {
    experiment_config c = default_config();
    bool saw_table = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::set<std::string> seen;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        size_t hash = s.find('#');
        if (hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            if (section != "world" && section != "learner" && section != "run")
                fail(line, "unknown section [" + section + "]");
            continue;
        }

        size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "missing key");
        if (value.empty()) fail(line, "missing value for '" + key + "'");
        if (section.empty()) fail(line, "key '" + key + "' outside any section");
        if (!seen.insert(section + "." + key).second)
            fail(line, "duplicate key '" + key + "' in [" + section + "]");

        if (section == "world") {
            if (key == "grid_width") c.world.grid.width = parse_int(value, line);
            else if (key == "grid_height") c.world.grid.height = parse_int(value, line);
            else if (key == "cell_side") c.world.grid.side = parse_double(value, line);
            else if (key == "origin") c.world.grid.origin = parse_double(value, line);
            else if (key == "sensing_radius") c.world.grid.sensing_radius = parse_double(value, line);
            else if (key == "density") c.world.density.kind = density_from_name(value, line);
            else if (key == "gaussian_mean_x") c.world.density.mean_x = parse_double(value, line);
            else if (key == "gaussian_mean_y") c.world.density.mean_y = parse_double(value, line);
            else if (key == "move_from_x") c.world.density.schedule.from_x = parse_double(value, line);
            else if (key == "move_from_y") c.world.density.schedule.from_y = parse_double(value, line);
            else if (key == "move_to_x") c.world.density.schedule.to_x = parse_double(value, line);
            else if (key == "move_to_y") c.world.density.schedule.to_y = parse_double(value, line);
            else if (key == "move_start_t") c.world.density.schedule.t_start = parse_int(value, line);
            else if (key == "move_end_t") c.world.density.schedule.t_end = parse_int(value, line);
            else if (key == "obstacles") c.world.obstacles = parse_cells(value, line);
            else if (key == "tabulated_values") {
                c.world.density.table = parse_doubles(value, line);
                saw_table = true;
            }
            else if (key == "scale_margin") c.world.scale_margin = parse_double(value, line);
            else if (key == "agents") c.agents = parse_int(value, line);
            else fail(line, "unknown key '" + key + "' in [world]");
        } else if (section == "learner") {
            if (key == "algorithm") {
                try {
                    c.algorithm = algorithm_from_name(value);
                } catch (const std::runtime_error& e) {
                    fail(line, e.what());
                }
            }
            else if (key == "kappa") c.kappa = parse_double(value, line);
            else if (key == "epsilon_mode") {
                if (value == "constant") c.constant_epsilon = true;
                else if (value == "inhomogeneous") c.constant_epsilon = false;
                else fail(line, "epsilon_mode must be constant or inhomogeneous");
            }
            else if (key == "epsilon") c.epsilon = parse_double(value, line);
            else fail(line, "unknown key '" + key + "' in [learner]");
        } else {
            if (key == "horizon") c.horizon = parse_int(value, line);
            else if (key == "seeds") c.seeds = parse_seeds(value, line);
            else if (key == "initial") c.initial = parse_cells(value, line);
            else if (key == "out_dir") c.out_dir = value;
            else if (key == "threads") c.threads = parse_int(value, line);
            else fail(line, "unknown key '" + key + "' in [run]");
        }
    }

    if (saw_table && c.world.density.kind != density_kind::tabulated)
        throw std::runtime_error("config: tabulated_values given but density is not tabulated");

    validate_config(c);
    return c;
}

std::string emit_config(const experiment_config& c) {
    std::string out;
    auto kv = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    out += "[world]\n";
    kv("grid_width", std::to_string(c.world.grid.width));
    kv("grid_height", std::to_string(c.world.grid.height));
    kv("cell_side", format_double(c.world.grid.side));
    kv("origin", format_double(c.world.grid.origin));
    kv("sensing_radius", format_double(c.world.grid.sensing_radius));
    kv("density", density_name(c.world.density.kind));
    kv("gaussian_mean_x", format_double(c.world.density.mean_x));
    kv("gaussian_mean_y", format_double(c.world.density.mean_y));
    kv("move_from_x", format_double(c.world.density.schedule.from_x));
    kv("move_from_y", format_double(c.world.density.schedule.from_y));
    kv("move_to_x", format_double(c.world.density.schedule.to_x));
    kv("move_to_y", format_double(c.world.density.schedule.to_y));
    kv("move_start_t", std::to_string(c.world.density.schedule.t_start));
    kv("move_end_t", std::to_string(c.world.density.schedule.t_end));
    kv("obstacles", emit_cells(c.world.obstacles));
    if (c.world.density.kind == density_kind::tabulated) {
        std::string vals;
        for (size_t i = 0; i < c.world.density.table.size(); ++i) {
            if (i) vals += ',';
            vals += format_double(c.world.density.table[i]);
        }
        kv("tabulated_values", vals);
    }
    kv("scale_margin", format_double(c.world.scale_margin));
    kv("agents", std::to_string(c.agents));
    out += "\n[learner]\n";
    kv("algorithm", algorithm_name(c.algorithm));
    kv("kappa", format_double(c.kappa));
    kv("epsilon_mode", c.constant_epsilon ? "constant" : "inhomogeneous");
    kv("epsilon", format_double(c.epsilon));
    out += "\n[run]\n";
    kv("horizon", std::to_string(c.horizon));
    kv("seeds", emit_seeds(c.seeds));
    kv("initial", emit_cells(c.initial));
    kv("out_dir", c.out_dir);
    kv("threads", std::to_string(c.threads));
    return out;
}

void validate_config(const experiment_config& c) {
    auto bad = [](const std::string& what) {
        throw std::runtime_error("config: " + what);
    };

    if (c.world.grid.width < 1 || c.world.grid.height < 1)
        bad("grid dimensions must be positive");
    if (!(c.world.grid.side > 0.0)) bad("cell_side must be positive");
    if (!(c.world.grid.sensing_radius >= 0.0)) bad("sensing_radius must be nonnegative");
    if (!(c.world.scale_margin > 0.0 && c.world.scale_margin < 1.0))
        bad("scale_margin must lie in (0, 1)");
    if (c.agents < 1) bad("agents must be at least 1");
    if (c.world.density.kind == density_kind::tabulated) {
        size_t want = static_cast<size_t>(c.world.grid.width) * c.world.grid.height;
        if (c.world.density.table.size() != want)
            bad("tabulated_values needs exactly width*height entries");
        for (double v : c.world.density.table)
            if (!(v >= 0.0)) bad("tabulated_values must be nonnegative");
    }
    if (c.world.density.kind == density_kind::moving_gaussian &&
        c.world.density.schedule.t_end <= c.world.density.schedule.t_start)
        bad("move_end_t must exceed move_start_t");
    {
        std::set<std::pair<int, int>> uniq(c.world.obstacles.begin(), c.world.obstacles.end());
        if (uniq.size() != c.world.obstacles.size()) bad("duplicate obstacle cells");
    }

    if (c.horizon < 2) bad("horizon must be at least 2");
    if (c.seeds.empty()) bad("at least one seed required");
    {
        std::set<std::uint64_t> uniq(c.seeds.begin(), c.seeds.end());
        if (uniq.size() != c.seeds.size()) bad("seeds must be distinct");
    }
    if (c.threads < 0) bad("threads must be nonnegative");
    if (static_cast<int>(c.initial.size()) != c.agents)
        bad("initial needs exactly one cell per agent");

    if (c.constant_epsilon && !(c.epsilon > 0.0 && c.epsilon <= 0.5))
        bad("constant epsilon must lie in (0, 1/2]");
    if (c.algorithm == algorithm_kind::phpip && !c.constant_epsilon)
        bad("phpip uses a constant exploration rate");

    coverage_game cg;
    try {
        cg = build_coverage_game(c.world, c.agents);
    } catch (const std::exception& e) {
        bad(std::string("world does not build: ") + e.what());
    }

    for (auto [j, l] : c.initial) {
        if (j < 0 || j >= c.world.grid.width || l < 0 || l >= c.world.grid.height)
            bad("initial cell outside the grid");
        if (cg.cell_action(l * c.world.grid.width + j) < 0)
            bad("initial cell is an obstacle");
    }

    if (c.algorithm != algorithm_kind::disl) {
        size_t cmax = 0;
        for (const auto& per_agent : cg.game().reachable)
            for (const auto& r : per_agent) cmax = std::max(cmax, r.size());
        double lower = 1.0 / (static_cast<double>(cmax) - 1.0);
        if (!(c.kappa > lower && c.kappa <= 0.5))
            bad("kappa must lie in (1/(C-1), 1/2] = (" + format_double(lower) +
                ", 0.5] for this world's largest reachable set C = " +
                std::to_string(cmax));
    }
}

experiment_config preset_experiment1() {
    experiment_config c = default_config();
    c.world.density.kind = density_kind::gaussian;
    c.world.obstacles = {{2, 4}, {3, 3}, {4, 2}, {5, 1}};
    c.out_dir = "out/experiment1";
    return c;
}

experiment_config preset_experiment1_eps03() {
    experiment_config c = preset_experiment1();
    c.epsilon = 0.3;
    c.out_dir = "out/experiment1_eps03";
    return c;
}

experiment_config preset_experiment2() {
    experiment_config c = default_config();
    c.world.density.kind = density_kind::moving_gaussian;
    c.horizon = 1000;
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
    c.out_dir = "out/experiment2";
    return c;
}

std::vector<std::string> preset_names() {
    return {"experiment1", "experiment1_eps03", "experiment2"};
}

experiment_config preset_by_name(const std::string& name) {
    if (name == "experiment1") return preset_experiment1();
    if (name == "experiment1_eps03") return preset_experiment1_eps03();
    if (name == "experiment2") return preset_experiment2();
    throw std::runtime_error("unknown preset '" + name + "' (have: experiment1, "
                             "experiment1_eps03, experiment2)");
}

} // namespace pipip
