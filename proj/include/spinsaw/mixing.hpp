// Mixing-condition checkers, parametric decay bounds, empirical decay
// measurement, and executable oracles for the contraction inequalities the
// bounds rest on.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "spinsaw/exact_oracle.hpp"
#include "spinsaw/graph.hpp"
#include "spinsaw/numeric.hpp"
#include "spinsaw/saw_tree.hpp"
#include "spinsaw/spin_system.hpp"
#include "spinsaw/tree_marginal.hpp"

namespace spinsaw {

enum class Regime {
    InverseTemperature,  // small-coupling condition; bound applies to log marginals
    FieldDominated,      // strong-field condition; bound applies to marginals
    None,
};

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::InverseTemperature: return "inverse-temperature";
        case Regime::FieldDominated: return "field-dominated";
        case Regime::None: return "none";
    }
    return "?";
}

// Parametric decay function f(t) = prefactor(root_degree) * rate^(t-1).
// The prefactor scales with the degree of the vertex the bound is evaluated
// at, so the degree coefficient is stored and resolved at evaluation time.
struct DecayBound {
    Regime regime = Regime::None;
    double degree_coeff = 0.0;  // prefactor = degree_coeff * root_degree
    double rate = 0.0;          // in [0,1) when regime != None
    bool log_form = false;      // true: bounds |log p - log p'| instead of |p - p'|

    double prefactor(double root_degree) const { return degree_coeff * root_degree; }

    double log_value(int t, double root_degree) const {
        if (t < 1) throw std::invalid_argument("DecayBound: t must be >= 1");
        const double lp = std::log(prefactor(root_degree));
        if (t == 1) return lp;
        return lp + (t - 1) * std::log(rate);
    }

    double value(int t, double root_degree) const {
        return std::exp(log_value(t, root_degree));
    }
};

// Critical coupling at sparsity parameter d: (1/2) log(d / (d-2)). Below it
// (d-1) tanh J < 1. No finite threshold exists for d <= 2.
inline double critical_coupling(double d) {
    if (d <= 0.0) throw std::invalid_argument("critical_coupling: d must be positive");
    if (d <= 2.0) return kInf;
    return 0.5 * std::log(d / (d - 2.0));
}

// Field threshold B(d, alpha, gamma) = (d-1) alpha / 2 + log((sqrt(g(d-1)) +
// sqrt(g(d-1) - 4)) / 2). Defined only when gamma * (d-1) >= 4, which the
// strong-field regime guarantees.
inline double field_threshold(double d, double alpha, double gamma) {
    const double gd = gamma * (d - 1.0);
    if (gd < 4.0)
        throw std::domain_error(
            "field_threshold: gamma*(d-1) < 4; outside the regime where the strong-field "
            "condition is meaningful (it requires (d-1) tanh J >= 1, which forces "
            "gamma*(d-1) >= 4)");
    return 0.5 * (d - 1.0) * alpha + std::log(0.5 * (std::sqrt(gd) + std::sqrt(gd - 4.0)));
}

namespace detail {

inline double field_rate(double d, double gamma, double x) {
    // (d-1) * gamma * e^x / (1 + e^x)^2, evaluated in log space.
    return std::exp(std::log(d - 1.0) + std::log(gamma) + x - 2.0 * log1p_exp(x));
}

}  // namespace detail

// Decides which decay bound applies at sparsity parameter d: the
// inverse-temperature bound when (d-1) tanh J < 1, otherwise the
// field-dominated bound when the fields sit beyond the threshold on either
// side, otherwise none.
inline DecayBound classify_mixing(const SystemParameters& params, double d) {
    if (d <= 0.0) throw std::invalid_argument("classify_mixing: d must be positive");
    const double j = params.max_coupling.value_or(0.0);
    DecayBound b;
    const double temp_rate = (d - 1.0) * std::tanh(j);
    if (temp_rate < 1.0) {
        b.regime = Regime::InverseTemperature;
        b.degree_coeff = 4.0 * j;
        b.rate = std::max(temp_rate, 0.0);
        b.log_form = true;
        return b;
    }
    const double gamma = params.gamma.value_or(0.0);
    if (gamma * (d - 1.0) < 4.0) return b;  // cannot happen with exact arithmetic
    const double b_min = params.field_min.value_or(0.0);
    const double b_max = params.field_max.value_or(0.0);
    const double a_max = params.alpha_max.value_or(0.0);
    const double a_min = params.alpha_min.value_or(0.0);
    double x = 0.0;
    if (b_min > field_threshold(d, a_max, gamma)) {
        x = 2.0 * b_min - (d - 1.0) * a_max;
    } else if (b_max < -field_threshold(d, -a_min, gamma)) {
        x = 2.0 * b_max - (d - 1.0) * a_min;
    } else {
        return b;
    }
    const double rate = detail::field_rate(d, gamma, x);
    if (rate >= 1.0) return b;  // threshold met only up to rounding
    b.regime = Regime::FieldDominated;
    b.degree_coeff = 0.25 * gamma;
    b.rate = rate;
    b.log_form = false;
    return b;
}

// Bounded-degree relaxation: each vertex may satisfy either side of the
// field condition on its own. The decay rate is the worst per-vertex rate.
inline DecayBound classify_mixing_per_vertex(const SpinSystem& sys, double d) {
    const SystemParameters params = derive_parameters(sys);
    const double j = params.max_coupling.value_or(0.0);
    if ((d - 1.0) * std::tanh(j) < 1.0) return classify_mixing(params, d);
    DecayBound b;
    const double gamma = params.gamma.value_or(0.0);
    if (gamma * (d - 1.0) < 4.0) return b;
    const double a_max = params.alpha_max.value_or(0.0);
    const double a_min = params.alpha_min.value_or(0.0);
    const double thr_up = field_threshold(d, a_max, gamma);
    const double thr_dn = -field_threshold(d, -a_min, gamma);
    double worst_rate = 0.0;
    for (int v = 0; v < sys.vertex_count(); ++v) {
        const double bv = sys.field(v).bias();
        double x = 0.0;
        if (bv > thr_up)
            x = 2.0 * bv - (d - 1.0) * a_max;
        else if (bv < thr_dn)
            x = 2.0 * bv - (d - 1.0) * a_min;
        else
            return b;  // this vertex satisfies neither side
        worst_rate = std::max(worst_rate, detail::field_rate(d, gamma, x));
    }
    if (worst_rate >= 1.0) return b;
    b.regime = Regime::FieldDominated;
    b.degree_coeff = 0.25 * gamma;
    b.rate = worst_rate;
    b.log_form = false;
    return b;
}

// Exponential envelope for root-marginal log-ratios on trees under boundary
// pairs differing only at depth >= t: 4 * J * s * tanh(J)^(t-1) with s the
// sphere size at depth t.
inline double tree_log_ratio_envelope(double max_coupling, std::size_t sphere_size, int t) {
    if (t < 1) throw std::invalid_argument("tree_log_ratio_envelope: t must be >= 1");
    if (sphere_size == 0) return 0.0;
    return 4.0 * max_coupling * static_cast<double>(sphere_size) *
           std::pow(std::tanh(max_coupling), t - 1);
}

enum class BoundaryStrategy {
    Extremal,    // all-plus vs all-minus boundaries
    Exhaustive,  // every boundary pair, gated by sphere size
};

struct DecayRow {
    int t = 0;
    std::size_t sphere_size = 0;
    double observed_diff = 0.0;      // max |p - p'| over tested boundary pairs
    double observed_log_diff = 0.0;  // max |log p - log p'|
    double bound = kInf;             // theorem decay value f(t), inf when regime is None
    Regime regime = Regime::None;
};

// Measures the spatial-mixing definition directly: for each t, conditions the
// sphere at distance t from v and compares exact root marginals of the
// self-avoiding tree across boundary assignments.
inline std::vector<DecayRow> empirical_decay(const SpinSystem& sys, int v,
                                             std::span<const int> t_values, double d,
                                             BoundaryStrategy strategy = BoundaryStrategy::Extremal,
                                             int exhaustive_limit = 16) {
    const SystemParameters params = derive_parameters(sys);
    const DecayBound bound = classify_mixing(params, d);
    const int n = sys.vertex_count();
    std::vector<DecayRow> rows;
    rows.reserve(t_values.size());
    for (int t : t_values) {
        if (t < 1) throw std::invalid_argument("empirical_decay: t must be >= 1");
        DecayRow row;
        row.t = t;
        row.regime = bound.regime;
        if (bound.regime != Regime::None) row.bound = bound.value(t, sys.graph().degree(v));
        const std::vector<int> shell = sphere(sys.graph(), v, t);
        row.sphere_size = shell.size();
        if (!shell.empty()) {
            double p_min = kInf, p_max = -kInf;
            auto probe = [&](const PartialConfig& cfg) {
                const double p = exact_root_marginal(build_saw_tree(sys, v, cfg)).p_plus;
                p_min = std::min(p_min, p);
                p_max = std::max(p_max, p);
            };
            if (strategy == BoundaryStrategy::Exhaustive &&
                static_cast<int>(shell.size()) <= std::min(exhaustive_limit, 30)) {
                const std::uint64_t total = std::uint64_t{1} << shell.size();
                for (std::uint64_t mask = 0; mask < total; ++mask) {
                    PartialConfig cfg(n);
                    for (std::size_t i = 0; i < shell.size(); ++i)
                        cfg.fix(shell[i], (mask >> i) & 1u ? Spin::Plus : Spin::Minus);
                    probe(cfg);
                }
            } else {
                for (Spin s : {Spin::Plus, Spin::Minus}) {
                    PartialConfig cfg(n);
                    for (int u : shell) cfg.fix(u, s);
                    probe(cfg);
                }
            }
            row.observed_diff = p_max - p_min;
            row.observed_log_diff = std::log(p_max) - std::log(p_min);
        }
        rows.push_back(row);
    }
    return rows;
}

// --- inequality oracles -------------------------------------------------------

// Contraction of the Moebius map g(x) = (a x + b) / (c x + d): the odds
// ratio of outputs is bounded by the odds ratio of inputs raised to
// |sqrt(ad) - sqrt(bc)| / (sqrt(ad) + sqrt(bc)).
inline bool lemma31_holds(double a, double b, double c, double d, double x, double y,
                          double rel_tol = 1e-12) {
    if (a <= 0 || b <= 0 || c <= 0 || d <= 0 || x <= 0 || y <= 0)
        throw std::invalid_argument("lemma31_holds: all inputs must be positive");
    const double sad = std::sqrt(a * d), sbc = std::sqrt(b * c);
    const double exponent = std::fabs(sad - sbc) / (sad + sbc);
    const double lhs_log = std::fabs(std::log((a * x + b) / (c * x + d)) -
                                     std::log((a * y + b) / (c * y + d)));
    const double rhs_log = exponent * std::fabs(std::log(x) - std::log(y));
    return lhs_log <= rhs_log + rel_tol * std::fmax(1.0, rhs_log);
}

// max over x in [0,1] of |edge_kernel| is bounded by the edge's gamma.
// Checks a dense grid plus the interior extremum of the denominator.
inline bool lemma33_holds(const EdgePotential& pot, int grid_points = 1000,
                          double rel_tol = 1e-12) {
    if (grid_points < 2) throw std::invalid_argument("lemma33_holds: need at least 2 grid points");
    const double gamma = pot.gamma();
    double worst = 0.0;
    auto consider = [&](double x) {
        if (x < 0.0 || x > 1.0 || !std::isfinite(x)) return;
        worst = std::fmax(worst, std::fabs(edge_kernel(pot, x)));
    };
    for (int i = 0; i < grid_points; ++i)
        consider(static_cast<double>(i) / (grid_points - 1));
    const double a = std::exp(pot.pp), b = std::exp(pot.pm);
    const double c = std::exp(pot.mp), d = std::exp(pot.mm);
    const double m = c - d, nn = a - b;
    if (m != 0.0 && nn != 0.0) consider(-(d * nn + b * m) / (2.0 * m * nn));
    return worst <= gamma + rel_tol * std::fmax(1.0, gamma);
}

// prod (1 + lambda_i) >= (1 + geometric-mean(lambda))^n.
inline bool lemma35_holds(std::span<const double> lambdas, double rel_tol = 1e-12) {
    if (lambdas.empty()) throw std::invalid_argument("lemma35_holds: empty input");
    double lhs_log = 0.0, mean_log = 0.0;
    for (double l : lambdas) {
        if (l <= 0.0) throw std::invalid_argument("lemma35_holds: inputs must be positive");
        lhs_log += std::log1p(l);
        mean_log += std::log(l);
    }
    mean_log /= static_cast<double>(lambdas.size());
    const double rhs_log = static_cast<double>(lambdas.size()) * log1p_exp(mean_log);
    return lhs_log >= rhs_log - rel_tol * std::fmax(1.0, std::fabs(rhs_log));
}

}  // namespace spinsaw
