// Deterministic approximation of the log partition function: sequential
// conditioning in label order, truncated self-avoiding-tree marginals, and
// the telescoped product estimate.
#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "spinsaw/mixing.hpp"
#include "spinsaw/numeric.hpp"
#include "spinsaw/saw_tree.hpp"
#include "spinsaw/spin_system.hpp"
#include "spinsaw/tree_marginal.hpp"

namespace spinsaw {

struct RegimeError : std::runtime_error {
    explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

struct FptasConfig {
    double epsilon = 0.1;                  // relative-error target, meaningful in (0,1]
    double d_parameter = 0.0;              // sparsity parameter used for depth selection
    std::optional<int> depth_override;     // bypasses depth selection (no guarantee bookkeeping)
    double init_value = 0.5;               // truncation initializer in [0,1]
    bool per_vertex_depth = true;          // false: one depth from the maximum degree
    int workers = 1;                       // independent per-vertex computations
};

struct VertexEstimate {
    int vertex = 0;
    double p_hat = 0.0;
    int depth = 0;
    double error_bound = 0.0;  // decay value f(depth) at this vertex, 0 if unavailable
    std::uint64_t nodes = 0;   // truncated-tree size visited for this vertex
};

struct FptasResult {
    double log_z_hat = 0.0;
    double base_log_weight = 0.0;  // log weight of the all-plus configuration
    double epsilon = 0.0;
    Regime regime = Regime::None;
    bool guarantee_met = false;
    std::vector<VertexEstimate> per_vertex;
    std::uint64_t total_nodes = 0;
};

// Log weight of the all-plus configuration: the fully conditioned partition
// function the telescoping starts from.
inline double base_log_weight(const SpinSystem& sys) {
    double acc = 0.0;
    for (int e = 0; e < sys.edge_count(); ++e) acc += sys.stored_potential(e).pp;
    for (int v = 0; v < sys.vertex_count(); ++v) acc += sys.field(v).plus;
    return acc;
}

// Smallest t >= 1 with prefactor * rate^(t-1) <= epsilon / (4n). The budget
// of epsilon/(2n) per vertex keeps the telescoped product within epsilon; the
// extra factor 2 absorbs the conversion between the log-form and
// probability-form statements of the decay bound.
inline int choose_depth(const DecayBound& bound, double epsilon, int n, double root_degree) {
    if (bound.regime == Regime::None)
        throw RegimeError("choose_depth: no decay regime applies; supply a depth override");
    if (epsilon <= 0.0) throw std::invalid_argument("choose_depth: epsilon must be positive");
    if (n < 1) throw std::invalid_argument("choose_depth: n must be >= 1");
    const double target_log = std::log(epsilon) - std::log(4.0 * n);
    const double pre = bound.prefactor(root_degree);
    if (pre <= 0.0 || std::log(pre) <= target_log) return 1;
    if (bound.rate <= 0.0) return 2;  // f(2) = 0
    const double log_rate = std::log(bound.rate);
    int t = static_cast<int>(std::ceil(1.0 + (std::log(pre) - target_log) / (-log_rate)));
    t = std::max(t, 1);
    auto ok = [&](int tt) { return std::log(pre) + (tt - 1) * log_rate <= target_log; };
    while (t > 1 && ok(t - 1)) --t;
    while (!ok(t)) ++t;
    return t;
}

namespace detail {

template <typename Fn>
inline void parallel_for(int n, int workers, Fn&& body) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<int> next_index{0};
    std::mutex idx_mu;
    auto run = [&]() {
        for (;;) {
            int i;
            {
                std::lock_guard<std::mutex> lk(idx_mu);
                if (next_index[0] >= n) return;
                i = next_index[0]++;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    const int count = std::min(workers, n);
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// The conditioning chain fixes vertices 0..j-1 to + when estimating vertex
// j's conditional marginal, so each per-vertex computation is independent and
// the reduction order is fixed by the vertex labels.
inline FptasResult approx_log_partition(const SpinSystem& sys, const FptasConfig& cfg) {
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("approx_log_partition: epsilon must be > 0");
    const int n = sys.vertex_count();
    const SystemParameters params = derive_parameters(sys);
    DecayBound bound;
    if (cfg.d_parameter > 0.0) bound = classify_mixing(params, cfg.d_parameter);
    if (bound.regime == Regime::None && !cfg.depth_override)
        throw RegimeError(
            "approx_log_partition: no decay regime applies for the supplied sparsity "
            "parameter; rerun with a depth override to compute without a guarantee");

    FptasResult res;
    res.base_log_weight = base_log_weight(sys);
    res.epsilon = cfg.epsilon;
    res.regime = bound.regime;
    res.per_vertex.resize(static_cast<std::size_t>(n));

    int global_depth = 0;
    if (!cfg.depth_override && !cfg.per_vertex_depth) {
        int max_deg = 0;
        for (int v = 0; v < n; ++v) max_deg = std::max(max_deg, sys.graph().degree(v));
        global_depth = choose_depth(bound, cfg.epsilon, std::max(n, 1), max_deg);
    }

    bool override_deep_enough = true;
    std::mutex flag_mu;
    std::vector<double> log_p(static_cast<std::size_t>(n), 0.0);

    detail::parallel_for(n, cfg.workers, [&](int j) {
        int depth;
        if (cfg.depth_override) {
            depth = *cfg.depth_override;
            if (bound.regime != Regime::None) {
                const int needed = choose_depth(bound, cfg.epsilon, n, sys.graph().degree(j));
                if (depth < needed) {
                    std::lock_guard<std::mutex> lk(flag_mu);
                    override_deep_enough = false;
                }
            }
        } else if (cfg.per_vertex_depth) {
            depth = choose_depth(bound, cfg.epsilon, n, sys.graph().degree(j));
        } else {
            depth = global_depth;
        }
        if (depth < 1) throw std::invalid_argument("approx_log_partition: depth must be >= 1");

        PartialConfig chain(n);
        for (int i = 0; i < j; ++i) chain.fix(i, Spin::Plus);
        const SawTree tree = build_saw_tree(sys, j, chain, depth);
        const MarginalResult m = truncated_root_marginal(tree, depth, cfg.init_value);
        const double lp = log_logistic(m.log_ratio);
        if (!std::isfinite(lp))
            throw std::runtime_error(
                "approx_log_partition: conditional marginal underflowed to zero");
        log_p[static_cast<std::size_t>(j)] = lp;
        VertexEstimate& est = res.per_vertex[static_cast<std::size_t>(j)];
        est.vertex = j;
        est.p_hat = m.p_plus;
        est.depth = depth;
        est.error_bound =
            bound.regime != Regime::None ? bound.value(depth, sys.graph().degree(j)) : 0.0;
        est.nodes = tree.size();
    });

    double sum_log_p = 0.0;
    for (int j = 0; j < n; ++j) {
        sum_log_p += log_p[static_cast<std::size_t>(j)];
        res.total_nodes += res.per_vertex[static_cast<std::size_t>(j)].nodes;
    }
    res.log_z_hat = res.base_log_weight - sum_log_p;
    res.guarantee_met = bound.regime != Regime::None && override_deep_enough;
    return res;
}

}  // namespace spinsaw
