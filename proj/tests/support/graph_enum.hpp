// Enumeration of connected graphs up to isomorphism, bitmask-based, for the
// exhaustive structural property sweeps. Feasible through n = 6; larger sizes
// use seeded sampling with canonical deduplication.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "spinsaw/graph.hpp"
#include "support/generators.hpp"

namespace testsupport {

namespace detail {

inline int pair_index(int n, int u, int v) {
    if (u > v) std::swap(u, v);
    // index of (u,v), u < v, in lexicographic pair order
    return u * n - u * (u + 1) / 2 + (v - u - 1);
}

inline bool mask_connected(int n, std::uint32_t mask) {
    std::uint32_t seen = 1;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            if (v == u || (seen >> v) & 1u) continue;
            if ((mask >> pair_index(n, u, v)) & 1u) {
                seen |= 1u << v;
                stack.push_back(v);
            }
        }
    }
    return seen == (n >= 32 ? ~0u : (1u << n) - 1u);
}

inline std::uint32_t canonical_mask(int n, std::uint32_t mask) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::uint32_t best = ~0u;
    do {
        std::uint32_t relabeled = 0;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if ((mask >> pair_index(n, u, v)) & 1u)
                    relabeled |= 1u << pair_index(n, perm[static_cast<std::size_t>(u)],
                                                  perm[static_cast<std::size_t>(v)]);
        best = std::min(best, relabeled);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline spinsaw::Graph mask_to_graph(int n, std::uint32_t mask) {
    spinsaw::Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if ((mask >> pair_index(n, u, v)) & 1u) g.add_edge(u, v);
    return g;
}

}  // namespace detail

// All connected graphs on exactly n vertices, one representative per
// isomorphism class. Exhaustive; intended for n <= 6.
inline std::vector<spinsaw::Graph> connected_graphs_up_to_iso(int n) {
    const int pairs = n * (n - 1) / 2;
    std::set<std::uint32_t> canon;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << pairs); ++mask) {
        if (!detail::mask_connected(n, mask)) continue;
        canon.insert(detail::canonical_mask(n, mask));
    }
    std::vector<spinsaw::Graph> out;
    out.reserve(canon.size());
    for (std::uint32_t mask : canon) out.push_back(detail::mask_to_graph(n, mask));
    return out;
}

// Seeded sample of connected graphs on n vertices, deduplicated by canonical
// form, with edge counts spread between tree-sparse and dense.
inline std::vector<spinsaw::Graph> sampled_connected_graphs(int n, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::set<std::uint32_t> canon;
    std::vector<spinsaw::Graph> out;
    const int max_extra = n * (n - 1) / 2 - (n - 1);
    int guard = 0;
    while (static_cast<int>(out.size()) < count && guard < count * 20) {
        ++guard;
        const int extra = uniform_int(rng, 0, max_extra);
        const spinsaw::Graph g = random_connected_graph(rng, n, extra);
        std::uint32_t mask = 0;
        for (const auto& [u, v] : g.edges()) mask |= 1u << detail::pair_index(n, u, v);
        const std::uint32_t c = detail::canonical_mask(n, mask);
        if (canon.insert(c).second) out.push_back(g);
    }
    return out;
}

}  // namespace testsupport
