// Seeded instance generators shared by the unit and acceptance suites.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "spinsaw/graph.hpp"
#include "spinsaw/spin_system.hpp"

namespace testsupport {

using spinsaw::Graph;
using spinsaw::PartialConfig;
using spinsaw::Spin;
using spinsaw::SpinSystem;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Connected graph on n vertices: a random spanning tree plus `extra` distinct
// chords, so cycle structure is controlled.
inline Graph random_connected_graph(Rng& rng, int n, int extra) {
    Graph g(n);
    for (int v = 1; v < n; ++v) g.add_edge(uniform_int(rng, 0, v - 1), v);
    const int max_edges = n * (n - 1) / 2;
    int budget = std::min(extra, max_edges - (n - 1));
    int guard = 0;
    while (budget > 0 && guard < 10000) {
        ++guard;
        const int u = uniform_int(rng, 0, n - 1);
        const int v = uniform_int(rng, 0, n - 1);
        if (u == v || g.has_edge(u, v)) continue;
        g.add_edge(u, v);
        --budget;
    }
    return g;
}

// Random tree: each vertex v >= 1 attaches to a uniformly random earlier one.
inline Graph random_tree(Rng& rng, int n) { return random_connected_graph(rng, n, 0); }

// Arbitrary finite potentials and fields with entries in [lo, hi].
inline SpinSystem random_system(Rng& rng, Graph g, double lo = -2.0, double hi = 2.0) {
    std::vector<spinsaw::EdgePotential> pots;
    pots.reserve(static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e)
        pots.push_back({uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi),
                        uniform(rng, lo, hi)});
    std::vector<spinsaw::VertexField> fields;
    fields.reserve(static_cast<std::size_t>(g.vertex_count()));
    for (int v = 0; v < g.vertex_count(); ++v)
        fields.push_back({uniform(rng, lo, hi), uniform(rng, lo, hi)});
    return SpinSystem(std::move(g), std::move(pots), std::move(fields));
}

inline SpinSystem random_ising(Rng& rng, Graph g, double j_lo, double j_hi, double b_lo,
                               double b_hi) {
    std::vector<double> js;
    for (int e = 0; e < g.edge_count(); ++e) js.push_back(uniform(rng, j_lo, j_hi));
    std::vector<double> bs;
    for (int v = 0; v < g.vertex_count(); ++v) bs.push_back(uniform(rng, b_lo, b_hi));
    return spinsaw::make_ising(std::move(g), js, bs);
}

// Each vertex fixed independently with probability p, random spin.
inline PartialConfig random_boundary(Rng& rng, int n, double p) {
    PartialConfig cfg(n);
    for (int v = 0; v < n; ++v)
        if (uniform(rng, 0.0, 1.0) < p)
            cfg.fix(v, uniform_int(rng, 0, 1) ? Spin::Plus : Spin::Minus);
    return cfg;
}

}  // namespace testsupport
