#pragma once

#include <cstdio>
#include <string>

namespace cdscap {

/// Fixed-point formatting with a stable number of decimals; all CSV output
/// goes through here so repeated runs are byte-identical.
inline std::string fmt_fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
    return buf;
}

inline std::string fmt_bp(double spread_decimal) { return fmt_fixed(spread_decimal * 1e4, 4); }

inline std::string fmt_pct(double fraction) { return fmt_fixed(fraction * 100.0, 1); }

} // namespace cdscap
