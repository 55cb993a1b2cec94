#pragma once

// Possibility degrees and the small fuzzy toolkit shared by every module.

#include <algorithm>
#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace scenematch {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

// A degree in [0, 1]. Construction outside that range throws.
class Possibility {
public:
    constexpr Possibility() = default;

    explicit Possibility(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw RangeError("possibility degree out of [0,1]: " + std::to_string(value));
        }
    }

    static constexpr Possibility zero() { return Possibility{}; }
    static Possibility one() { return Possibility{1.0}; }

    constexpr double value() const { return value_; }

    Possibility complement() const { return Possibility{1.0 - value_}; }

    friend constexpr auto operator<=>(const Possibility&, const Possibility&) = default;

private:
    double value_ = 0.0;
};

inline Possibility min(Possibility a, Possibility b) { return a < b ? a : b; }
inline Possibility max(Possibility a, Possibility b) { return a < b ? b : a; }

// Degrees read from documents are short decimals; differences of them are
// snapped so that 0.7 - 0.4 reports as 0.3.
inline double snap_degree(double x) {
    return std::round(x * 1e12) / 1e12;
}

// Snapped leader-minus-competitor difference, kept within [0, leader].
inline double likelihood_gap(double leader, double competitor) {
    return std::clamp(snap_degree(leader - competitor), 0.0, leader);
}

inline double clamp_unit(double x) {
    return std::clamp(x, 0.0, 1.0);
}

// Increasing ramp: 0 at or below `zero`, 1 at or above `full`.
inline double ramp_up(double x, double zero, double full) {
    if (x >= full) return 1.0;
    if (x <= zero) return 0.0;
    return (x - zero) / (full - zero);
}

// Decreasing ramp: 1 at or below `full`, 0 at or above `zero`.
inline double ramp_down(double x, double full, double zero) {
    if (x <= full) return 1.0;
    if (x >= zero) return 0.0;
    return (zero - x) / (zero - full);
}

} // namespace scenematch
