#include "pipip/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pipip/num_format.hpp"

namespace pipip {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

int to_int(const std::string& v) {
    int x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw std::runtime_error("trace: bad integer field '" + v + "'");
    return x;
}

double to_double(const std::string& v) {
    size_t idx = 0;
    double x = std::stod(v, &idx);
    if (idx != v.size())
        throw std::runtime_error("trace: bad numeric field '" + v + "'");
    return x;
}

} // namespace

void write_trace_csv(const std::string& path, const episode_trace& trace) {
    size_t n = trace.action.empty() ? 0 : trace.action.front().size();
    std::string out = "step,epsilon";
    for (size_t i = 0; i < n; ++i) out += ",action_" + std::to_string(i);
    for (size_t i = 0; i < n; ++i) out += ",utility_" + std::to_string(i);
    out += ",potential\n";

    for (size_t r = 0; r < trace.step.size(); ++r) {
        out += std::to_string(trace.step[r]);
        out += ',';
        out += format_double(trace.epsilon[r]);
        for (size_t i = 0; i < n; ++i) {
            out += ',';
            out += std::to_string(trace.action[r][i]);
        }
        for (size_t i = 0; i < n; ++i) {
            out += ',';
            out += format_double(trace.utility[r][i]);
        }
        out += ',';
        out += format_double(trace.has_potential ? trace.potential[r] : 0.0);
        out += '\n';
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("trace: cannot open '" + path + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("trace: write to '" + path + "' failed");
}

episode_trace read_trace_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("trace: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("trace: empty file '" + path + "'");

    auto header = split_row(line);
    size_t n = 0;
    while (2 + n < header.size() && header[2 + n] == "action_" + std::to_string(n)) ++n;
    if (header.size() != 3 + 2 * n || header[0] != "step" || header[1] != "epsilon" ||
        header.back() != "potential")
        throw std::runtime_error("trace: unexpected header in '" + path + "'");
    for (size_t i = 0; i < n; ++i)
        if (header[2 + n + i] != "utility_" + std::to_string(i))
            throw std::runtime_error("trace: unexpected header in '" + path + "'");

    episode_trace trace;
    trace.has_potential = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto row = split_row(line);
        if (row.size() != 3 + 2 * n)
            throw std::runtime_error("trace: wrong column count in '" + path + "'");
        trace.step.push_back(to_int(row[0]));
        trace.epsilon.push_back(to_double(row[1]));
        joint_action a(n);
        std::vector<double> u(n);
        for (size_t i = 0; i < n; ++i) a[i] = to_int(row[2 + i]);
        for (size_t i = 0; i < n; ++i) u[i] = to_double(row[2 + n + i]);
        trace.action.push_back(std::move(a));
        trace.utility.push_back(std::move(u));
        trace.potential.push_back(to_double(row.back()));
    }
    return trace;
}

} // namespace pipip
