// Root-marginal computation on trees: the exact bottom-up ratio recursion,
// its depth-truncated variant, the subtree-collapse identity, and the
// correlation-decay difference bound.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spinsaw/numeric.hpp"
#include "spinsaw/saw_tree.hpp"
#include "spinsaw/spin_system.hpp"

namespace spinsaw {

struct MarginalResult {
    double p_plus = 0.5;
    double log_ratio = 0.0;               // log(p / (1-p)), ±inf when degenerate
    std::optional<int> depth_used;        // unset: exact evaluation
    std::optional<double> error_bound;    // attached by callers that know one
};

// --- local recursion pieces in direct form ---------------------------------
// These materialize the exponentials of the potential entries; intended for
// moderate log-weights (property checks, bounds), not for deep accumulation.

// f(x) = (M x + d) / (N x + b) with M = c - d, N = a - b and x the child's
// probability of +; equals (c x + d(1-x)) / (a x + b(1-x)).
inline double edge_ratio(const EdgePotential& parent_to_child, double x) {
    const EdgePotential& e = parent_to_child;
    const double num = x * std::exp(e.mp) + (1.0 - x) * std::exp(e.mm);
    const double den = x * std::exp(e.pp) + (1.0 - x) * std::exp(e.pm);
    return num / den;
}

// h(x) = (a d - b c) / ((M x + d)(N x + b)); the x-derivative of -log f.
inline double edge_kernel(const EdgePotential& parent_to_child, double x) {
    const EdgePotential& e = parent_to_child;
    const double a = std::exp(e.pp), b = std::exp(e.pm), c = std::exp(e.mp), d = std::exp(e.mm);
    const double num = a * d - b * c;
    const double den = (x * c + (1.0 - x) * d) * (x * a + (1.0 - x) * b);
    return num / den;
}

// g = 1 / (1 + lambda * prod(ratios)); the product is accumulated in logs.
inline double vertex_recursion(double log_lambda, const std::vector<double>& edge_ratios) {
    double acc = log_lambda;
    for (double f : edge_ratios) acc += std::log(f);
    return logistic(-acc);
}

// --- log-ratio engine -------------------------------------------------------

// One multiplicative term of the ratio recursion in log space:
// log((a R + b) / (c R + d)) for a child with log-ratio r = log R.
// Fixed children enter through the limits a/c (r = +inf) and b/d (r = -inf),
// which are finite because the system has no hard constraints.
inline double child_ratio_term(const EdgePotential& parent_to_child, double r) {
    const EdgePotential& e = parent_to_child;
    if (r == kInf) return e.pp - e.mp;
    if (r == -kInf) return e.pm - e.mm;
    return log_add_exp(e.pp + r, e.pm) - log_add_exp(e.mp + r, e.mm);
}

namespace detail {

// Post-order sweep over the node array (children always follow parents, so a
// reverse index loop suffices). With a depth cap, free nodes at the cap that
// still have children evaluate to the initializer's log-odds.
inline double evaluate_log_ratio(const SawTree& t, std::optional<int> depth_cap, double init) {
    const SpinSystem& sys = t.system();
    const double init_lr = log_odds(init);
    std::vector<double> value(t.size());
    for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
        const SawNode& nd = t.node(i);
        if (depth_cap && nd.depth > *depth_cap) continue;
        double& out = value[static_cast<std::size_t>(i)];
        switch (nd.status) {
            case NodeStatus::FixedPlus:
                out = kInf;
                continue;
            case NodeStatus::FixedMinus:
                out = -kInf;
                continue;
            case NodeStatus::Truncated:
                out = init_lr;
                continue;
            case NodeStatus::Free:
                break;
        }
        if (depth_cap && nd.depth == *depth_cap && nd.child_end > nd.child_begin) {
            out = init_lr;
            continue;
        }
        double r = sys.field(nd.origin).plus - sys.field(nd.origin).minus;  // 2 B
        for (int c = nd.child_begin; c < nd.child_end; ++c) {
            const SawNode& ch = t.node(c);
            r += child_ratio_term(sys.potential_from(ch.edge, nd.origin),
                                  value[static_cast<std::size_t>(c)]);
        }
        out = r;
    }
    return value[0];
}

}  // namespace detail

// Exact root marginal via the bottom-up ratio recursion. The tree must not
// contain truncated nodes.
inline MarginalResult exact_root_marginal(const SawTree& t) {
    for (const SawNode& nd : t.nodes())
        if (nd.status == NodeStatus::Truncated)
            throw std::invalid_argument("exact_root_marginal: tree contains truncated nodes");
    MarginalResult res;
    res.log_ratio = detail::evaluate_log_ratio(t, std::nullopt, 0.5);
    res.p_plus = logistic(res.log_ratio);
    return res;
}

// Evaluates the recursion upward from depth t. Free nodes cut at depth t take
// the initializer value (default 1/2); fixed nodes keep their fixed value;
// free nodes that are natural leaves evaluate exactly, so a cap at or above
// the tree height reproduces exact_root_marginal bit for bit.
inline MarginalResult truncated_root_marginal(const SawTree& t, int depth, double init = 0.5) {
    if (depth < 1) throw std::invalid_argument("truncated_root_marginal: depth must be >= 1");
    if (init < 0.0 || init > 1.0)
        throw std::invalid_argument("truncated_root_marginal: initializer outside [0,1]");
    MarginalResult res;
    res.log_ratio = detail::evaluate_log_ratio(t, depth, init);
    res.p_plus = logistic(res.log_ratio);
    res.depth_used = depth;
    return res;
}

// --- tree-shaped systems -----------------------------------------------------

namespace detail {

struct RootedLayout {
    std::vector<int> parent;     // -1 at the root
    std::vector<int> bfs_order;  // parents precede children
};

inline RootedLayout root_layout(const SpinSystem& sys, int root) {
    const Graph& g = sys.graph();
    const int n = g.vertex_count();
    if (g.edge_count() != n - 1)
        throw std::invalid_argument("tree operation: system graph is not a tree");
    RootedLayout lay;
    lay.parent.assign(static_cast<std::size_t>(n), -2);
    lay.bfs_order.reserve(static_cast<std::size_t>(n));
    lay.parent[static_cast<std::size_t>(root)] = -1;
    lay.bfs_order.push_back(root);
    for (std::size_t head = 0; head < lay.bfs_order.size(); ++head) {
        const int u = lay.bfs_order[head];
        for (const HalfEdge& h : g.neighbors(u)) {
            if (lay.parent[static_cast<std::size_t>(h.to)] == -2) {
                lay.parent[static_cast<std::size_t>(h.to)] = u;
                lay.bfs_order.push_back(h.to);
            }
        }
    }
    if (static_cast<int>(lay.bfs_order.size()) != n)
        throw std::invalid_argument("tree operation: system graph is not connected");
    return lay;
}

// Per-spin log partition values z_v(s) over the subtree rooted at v,
// including h_v but excluding the edge to v's parent. Conditioned spins
// contribute -inf on the excluded branch.
inline std::vector<std::array<double, 2>> subtree_log_z(const SpinSystem& sys,
                                                        const RootedLayout& lay,
                                                        const PartialConfig& cond) {
    const int n = sys.vertex_count();
    std::vector<std::array<double, 2>> z(static_cast<std::size_t>(n));
    for (auto it = lay.bfs_order.rbegin(); it != lay.bfs_order.rend(); ++it) {
        const int v = *it;
        std::array<double, 2> zv = {sys.field(v).plus, sys.field(v).minus};
        if (cond.size() > 0 && cond.fixed(v)) {
            if (cond.spin(v) == Spin::Plus)
                zv[1] = -kInf;
            else
                zv[0] = -kInf;
        }
        for (const HalfEdge& h : sys.graph().neighbors(v)) {
            if (h.to == lay.parent[static_cast<std::size_t>(v)]) continue;
            const EdgePotential e = sys.potential_from(h.edge, v);
            const auto& zc = z[static_cast<std::size_t>(h.to)];
            if (zv[0] != -kInf) zv[0] += log_add_exp(e.pp + zc[0], e.pm + zc[1]);
            if (zv[1] != -kInf) zv[1] += log_add_exp(e.mp + zc[0], e.mm + zc[1]);
        }
        z[static_cast<std::size_t>(v)] = zv;
    }
    return z;
}

}  // namespace detail

// Log partition function of a tree-shaped system under a partial
// configuration, by dynamic programming from the leaves.
inline double tree_log_partition(const SpinSystem& sys, int root,
                                 const PartialConfig& cond = {}) {
    const auto lay = detail::root_layout(sys, root);
    const auto z = detail::subtree_log_z(sys, lay, cond);
    return log_add_exp(z[static_cast<std::size_t>(root)][0], z[static_cast<std::size_t>(root)][1]);
}

struct CollapseResult {
    SpinSystem system;
    int root;
    PartialConfig boundary;
    std::vector<int> old_to_new;  // -1 for removed vertices
};

// Removes the subtree hanging below l (child side of the tree edge (k,l))
// and folds its total weight into the field at k, leaving the root marginal
// unchanged. Operates on tree-shaped systems.
inline CollapseResult collapse_subtree(const SpinSystem& sys, int root, int k, int l,
                                       const PartialConfig& cond = {}) {
    const int n = sys.vertex_count();
    const auto lay = detail::root_layout(sys, root);
    if (l < 0 || l >= n || lay.parent[static_cast<std::size_t>(l)] != k)
        throw std::invalid_argument("collapse_subtree: (k,l) is not a root-oriented tree edge");

    const auto z = detail::subtree_log_z(sys, lay, cond);
    const auto& zl = z[static_cast<std::size_t>(l)];
    const EdgePotential kl = sys.potential_between(k, l);
    VertexField folded = sys.field(k);
    folded.plus += log_add_exp(kl.pp + zl[0], kl.pm + zl[1]);
    folded.minus += log_add_exp(kl.mp + zl[0], kl.mm + zl[1]);

    // Vertices of the removed subtree.
    std::vector<char> removed(static_cast<std::size_t>(n), 0);
    removed[static_cast<std::size_t>(l)] = 1;
    for (int v : lay.bfs_order) {
        const int p = lay.parent[static_cast<std::size_t>(v)];
        if (p >= 0 && removed[static_cast<std::size_t>(p)]) removed[static_cast<std::size_t>(v)] = 1;
    }

    // Compact relabeling preserves label order, so stored edge orientations
    // (smaller label first) carry over unchanged.
    std::vector<int> old_to_new(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int v = 0; v < n; ++v)
        if (!removed[static_cast<std::size_t>(v)]) old_to_new[static_cast<std::size_t>(v)] = next++;

    Graph g2(next);
    std::vector<EdgePotential> pots;
    for (int e = 0; e < sys.edge_count(); ++e) {
        const auto [u, v] = sys.graph().edges()[static_cast<std::size_t>(e)];
        const int u2 = old_to_new[static_cast<std::size_t>(u)];
        const int v2 = old_to_new[static_cast<std::size_t>(v)];
        if (u2 < 0 || v2 < 0) continue;
        g2.add_edge(u2, v2);
        pots.push_back(sys.stored_potential(e));
    }
    std::vector<VertexField> fields;
    fields.reserve(static_cast<std::size_t>(next));
    for (int v = 0; v < n; ++v) {
        if (removed[static_cast<std::size_t>(v)]) continue;
        fields.push_back(v == k ? folded : sys.field(v));
    }
    PartialConfig cond2(next);
    if (cond.size() > 0)
        for (int v = 0; v < n; ++v)
            if (!removed[static_cast<std::size_t>(v)] && cond.fixed(v))
                cond2.fix(old_to_new[static_cast<std::size_t>(v)], cond.spin(v));

    return CollapseResult{SpinSystem(std::move(g2), std::move(pots), std::move(fields)),
                          old_to_new[static_cast<std::size_t>(root)], std::move(cond2),
                          std::move(old_to_new)};
}

// --- correlation-decay difference bound --------------------------------------

// Computable envelope on |p - p'| for root marginals under boundary pairs
// differing only at depth >= t: gamma^t * |S(T,0,t)| * (1/4) * q^{t-1}, where
// q bounds the per-level factor g(1-g). q is 1/4 in general; when the fields
// push the recursion's odds away from 1 uniformly, the sharper endpoint value
// of r/(1+r)^2 applies.
inline double marginal_difference_bound(const SawTree& t, int depth,
                                        const SystemParameters& params) {
    if (depth < 1) throw std::invalid_argument("marginal_difference_bound: depth must be >= 1");
    const TreeStats stats = tree_stats(t);
    if (static_cast<std::size_t>(depth) >= stats.sphere_sizes.size()) return 0.0;
    const double s = static_cast<double>(stats.sphere_sizes[static_cast<std::size_t>(depth)]);
    if (s == 0.0) return 0.0;
    const double gamma = params.gamma.value_or(0.0);
    if (gamma == 0.0) return 0.0;

    int max_children = 0;
    for (const SawNode& nd : t.nodes())
        if (nd.status == NodeStatus::Free && nd.depth < depth)
            max_children = std::max(max_children, nd.child_end - nd.child_begin);

    // Feasible log-odds interval of the recursion: r = lambda * prod f with
    // each f in [e^alpha_min, e^alpha_max] and at most max_children factors.
    const double am = params.alpha_min.value_or(0.0);
    const double ax = params.alpha_max.value_or(0.0);
    const double lo = -2.0 * params.field_max.value_or(0.0) + std::min(0.0, max_children * am);
    const double hi = -2.0 * params.field_min.value_or(0.0) + std::max(0.0, max_children * ax);
    double q = 0.25;
    if (lo > 0.0)
        q = std::exp(lo - 2.0 * log1p_exp(lo));
    else if (hi < 0.0)
        q = std::exp(hi - 2.0 * log1p_exp(hi));
    q = std::min(q, 0.25);

    const double log_bound = std::log(s) + depth * std::log(gamma) - std::log(4.0) +
                             (depth - 1) * std::log(q);
    return std::exp(log_bound);
}

}  // namespace spinsaw
