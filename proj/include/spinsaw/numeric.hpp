// Small log-space numeric helpers shared across the library.
#pragma once

#include <cmath>
#include <limits>

namespace spinsaw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(x) + exp(y)), safe at -inf and widely different magnitudes.
inline double log_add_exp(double x, double y) {
    if (x == -kInf) return y;
    if (y == -kInf) return x;
    if (x == kInf || y == kInf) return kInf;
    const double hi = x > y ? x : y;
    const double lo = x > y ? y : x;
    return hi + std::log1p(std::exp(lo - hi));
}

// log(1 + exp(x)).
inline double log1p_exp(double x) {
    if (x == kInf) return kInf;
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// 1 / (1 + exp(-r)); maps log-odds back to a probability, exact at ±inf.
inline double logistic(double r) {
    if (r == kInf) return 1.0;
    if (r == -kInf) return 0.0;
    if (r >= 0.0) return 1.0 / (1.0 + std::exp(-r));
    const double e = std::exp(r);
    return e / (1.0 + e);
}

// log(p / (1 - p)) for p in [0, 1]; ±inf at the endpoints.
inline double log_odds(double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    return std::log(p) - std::log1p(-p);
}

// log(p) for p given as log-odds r: log(logistic(r)) computed without underflow.
inline double log_logistic(double r) {
    if (r == kInf) return 0.0;
    return -log1p_exp(-r);
}

inline bool nearly_equal(double a, double b, double rel, double abs = 0.0) {
    const double diff = std::fabs(a - b);
    const double scale = std::fmax(std::fabs(a), std::fabs(b));
    return diff <= abs + rel * scale;
}

}  // namespace spinsaw
