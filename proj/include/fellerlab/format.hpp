#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace feller {

/// Shortest round-trip decimal form, locale independent ("inf", "-inf", "nan" for non-finite).
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace feller
