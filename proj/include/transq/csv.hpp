#pragma once

#include <charconv>
#include <string>

namespace transq {

// Shortest round-trip decimal form; independent of the global locale.
inline std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace transq
