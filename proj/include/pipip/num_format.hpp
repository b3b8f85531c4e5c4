#pragma once

#include <charconv>
#include <string>

namespace pipip {

// Shortest decimal form that parses back to exactly the same double; keeps
// serialized numbers byte-stable across runs and platforms.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace pipip
