#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ato {

/// Error type thrown by all library operations on invalid input or state.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Closed real interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool valid() const { return lo <= hi; }
};

/// Rounds half away from zero, locale-free. Used everywhere a continuous
/// quantity becomes a piece count.
inline long long round_half_away(double x) {
    return std::llround(x);
}

/// Rounds to a non-negative piece count (clamps negatives to zero).
inline int to_piece_count(double x) {
    long long r = round_half_away(x);
    return r < 0 ? 0 : static_cast<int>(r);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

} // namespace ato
