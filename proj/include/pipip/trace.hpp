#pragma once

#include <string>

#include "pipip/learning.hpp"

namespace pipip {

// CSV layout, one row per decision step:
//   step,epsilon,action_0..action_{n-1},utility_0..utility_{n-1},potential
// Numbers are written with shortest round-trip formatting and the file is
// opened in binary mode, so identical traces are byte-identical everywhere.
void write_trace_csv(const std::string& path, const episode_trace& trace);

// Strict inverse of write_trace_csv (header checked, column count fixed).
episode_trace read_trace_csv(const std::string& path);

} // namespace pipip
