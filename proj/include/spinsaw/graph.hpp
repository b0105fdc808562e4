// Simple undirected graphs: adjacency, BFS distances, the path-density
// sparsity metrics, and deterministic generators.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinsaw {

// Half of an undirected edge as seen from one endpoint.
struct HalfEdge {
    int to;
    int edge;  // index into Graph::edges()
};

// Simple undirected graph on vertices 0..n-1. No self-loops, no parallel
// edges. Carries a total vertex order (default: label order) used by the
// self-avoiding-tree edge comparison.
class Graph {
public:
    Graph() = default;

    explicit Graph(int n) : adj_(static_cast<std::size_t>(n)) {
        if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
        rank_.resize(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) rank_[static_cast<std::size_t>(v)] = v;
    }

    int vertex_count() const { return static_cast<int>(adj_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    void add_edge(int u, int v) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw std::invalid_argument("Graph: self-loop rejected");
        if (has_edge(u, v)) throw std::invalid_argument("Graph: duplicate edge rejected");
        if (u > v) std::swap(u, v);
        const int id = static_cast<int>(edges_.size());
        edges_.emplace_back(u, v);
        insert_sorted(adj_[static_cast<std::size_t>(u)], {v, id});
        insert_sorted(adj_[static_cast<std::size_t>(v)], {u, id});
    }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        const auto& a = adj_[static_cast<std::size_t>(u)];
        return std::any_of(a.begin(), a.end(), [v](const HalfEdge& h) { return h.to == v; });
    }

    int degree(int v) const {
        check_vertex(v);
        return static_cast<int>(adj_[static_cast<std::size_t>(v)].size());
    }

    // Neighbors in ascending label order, each paired with its edge index.
    const std::vector<HalfEdge>& neighbors(int v) const {
        check_vertex(v);
        return adj_[static_cast<std::size_t>(v)];
    }

    // Edges as (u, v) pairs with u < v, indexed by insertion order.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    std::optional<int> edge_index(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        for (const HalfEdge& h : adj_[static_cast<std::size_t>(u)])
            if (h.to == v) return h.edge;
        return std::nullopt;
    }

    // Total vertex order; order[k] is the vertex of rank k.
    void set_vertex_order(const std::vector<int>& order) {
        const int n = vertex_count();
        if (static_cast<int>(order.size()) != n)
            throw std::invalid_argument("Graph: vertex order has wrong size");
        std::vector<int> rank(static_cast<std::size_t>(n), -1);
        for (int k = 0; k < n; ++k) {
            const int v = order[static_cast<std::size_t>(k)];
            check_vertex(v);
            if (rank[static_cast<std::size_t>(v)] != -1)
                throw std::invalid_argument("Graph: vertex order is not a permutation");
            rank[static_cast<std::size_t>(v)] = k;
        }
        rank_ = std::move(rank);
    }

    int order_rank(int v) const {
        check_vertex(v);
        return rank_[static_cast<std::size_t>(v)];
    }

private:
    static void insert_sorted(std::vector<HalfEdge>& a, HalfEdge h) {
        auto it = std::lower_bound(a.begin(), a.end(), h.to,
                                   [](const HalfEdge& x, int t) { return x.to < t; });
        a.insert(it, h);
    }

    void check_vertex(int v) const {
        if (v < 0 || v >= vertex_count())
            throw std::out_of_range("Graph: vertex " + std::to_string(v) + " out of range");
    }

    std::vector<std::vector<HalfEdge>> adj_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<int> rank_;
};

// BFS distances from v; -1 marks unreachable vertices.
inline std::vector<int> bfs_distances(const Graph& g, int v) {
    std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(v)] = 0;
    q.push(v);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const HalfEdge& h : g.neighbors(u)) {
            if (dist[static_cast<std::size_t>(h.to)] == -1) {
                dist[static_cast<std::size_t>(h.to)] = dist[static_cast<std::size_t>(u)] + 1;
                q.push(h.to);
            }
        }
    }
    return dist;
}

// Shortest-path length, or nullopt when u and v are disconnected.
inline std::optional<int> distance(const Graph& g, int u, int v) {
    const int d = bfs_distances(g, u)[static_cast<std::size_t>(v)];
    if (d < 0) return std::nullopt;
    return d;
}

// Vertices at distance <= l from v.
inline std::vector<int> ball(const Graph& g, int v, int l) {
    std::vector<int> out;
    const auto dist = bfs_distances(g, v);
    for (int u = 0; u < g.vertex_count(); ++u)
        if (dist[static_cast<std::size_t>(u)] >= 0 && dist[static_cast<std::size_t>(u)] <= l)
            out.push_back(u);
    return out;
}

// Vertices at distance exactly l from v.
inline std::vector<int> sphere(const Graph& g, int v, int l) {
    std::vector<int> out;
    const auto dist = bfs_distances(g, v);
    for (int u = 0; u < g.vertex_count(); ++u)
        if (dist[static_cast<std::size_t>(u)] == l) out.push_back(u);
    return out;
}

namespace detail {

inline void path_density_dfs(const Graph& g, int u, int budget, double sum, double& best,
                             std::vector<char>& on_path) {
    if (sum > best) best = sum;
    if (budget == 0) return;
    on_path[static_cast<std::size_t>(u)] = 1;
    for (const HalfEdge& h : g.neighbors(u)) {
        if (on_path[static_cast<std::size_t>(h.to)]) continue;
        path_density_dfs(g, h.to, budget - 1, sum + g.degree(h.to), best, on_path);
    }
    on_path[static_cast<std::size_t>(u)] = 0;
}

}  // namespace detail

// Largest degree sum over self-avoiding paths starting at v with at most l
// edges. The length-0 path counts, so the result is always >= deg(v).
// Cost is exponential in l; intended for small radii.
inline double maximal_path_density(const Graph& g, int v, int l) {
    if (l < 0) throw std::invalid_argument("maximal_path_density: negative length budget");
    double best = 0.0;
    std::vector<char> on_path(static_cast<std::size_t>(g.vertex_count()), 0);
    detail::path_density_dfs(g, v, l, static_cast<double>(g.degree(v)), best, on_path);
    return best;
}

// (m(G,v,l) - deg(v)) / l.
inline double avg_path_degree(const Graph& g, int v, int l) {
    if (l < 1) throw std::invalid_argument("avg_path_degree: length budget must be >= 1");
    return (maximal_path_density(g, v, l) - g.degree(v)) / static_cast<double>(l);
}

// Maximum average degree at radius l: max over v of avg_path_degree.
inline double max_avg_degree(const Graph& g, int l) {
    if (l < 1) throw std::invalid_argument("max_avg_degree: length budget must be >= 1");
    double best = 0.0;
    for (int v = 0; v < g.vertex_count(); ++v)
        best = std::max(best, avg_path_degree(g, v, l));
    return best;
}

// Per-vertex sparsity summary at radius l.
struct SparsityReport {
    int vertex = 0;
    int radius = 0;
    double path_density = 0.0;    // m(G,v,l)
    double avg_path_degree = 0.0; // (m - deg(v)) / l
    double max_avg_degree = 0.0;  // graph-wide maximum at the same radius
};

inline SparsityReport sparsity_report(const Graph& g, int v, int l) {
    SparsityReport r;
    r.vertex = v;
    r.radius = l;
    r.path_density = maximal_path_density(g, v, l);
    r.avg_path_degree = avg_path_degree(g, v, l);
    r.max_avg_degree = max_avg_degree(g, l);
    return r;
}

// --- generators ------------------------------------------------------------

inline Graph path_graph(int n) {
    Graph g(n);
    for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
    return g;
}

inline Graph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle_graph: need at least 3 vertices");
    Graph g(n);
    for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
    g.add_edge(n - 1, 0);
    return g;
}

inline Graph complete_graph(int n) {
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

// Every internal vertex has two children; depth 0 is a single vertex.
inline Graph complete_binary_tree(int depth) {
    if (depth < 0) throw std::invalid_argument("complete_binary_tree: negative depth");
    const int n = (1 << (depth + 1)) - 1;
    Graph g(n);
    for (int v = 1; v < n; ++v) g.add_edge((v - 1) / 2, v);
    return g;
}

// Rooted tree where the root has d children and every other internal vertex
// has d-1 children, so all non-leaf vertices have degree d.
inline Graph regular_tree(int d, int depth) {
    if (d < 1) throw std::invalid_argument("regular_tree: degree must be >= 1");
    if (depth < 0) throw std::invalid_argument("regular_tree: negative depth");
    Graph g(1);
    if (depth == 0) return g;
    std::vector<int> frontier{0};
    int next = 1;
    std::vector<std::pair<int, int>> pending;
    int total = 1;
    for (int level = 0; level < depth; ++level) {
        std::vector<int> fresh;
        for (int v : frontier) {
            const int kids = (level == 0) ? d : d - 1;
            for (int k = 0; k < kids; ++k) {
                pending.emplace_back(v, next);
                fresh.push_back(next);
                ++next;
            }
        }
        frontier = std::move(fresh);
        total = next;
    }
    Graph out(total);
    for (auto [u, v] : pending) out.add_edge(u, v);
    return out;
}

inline Graph erdos_renyi_graph(int n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("erdos_renyi_graph: p outside [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (unit(rng) < p) g.add_edge(u, v);
    return g;
}

// Pairing-model sampler; resamples until the pairing is simple.
inline Graph random_regular_graph(int n, int d, std::uint64_t seed) {
    if (d < 0 || d >= n) throw std::invalid_argument("random_regular_graph: infeasible degree");
    if ((static_cast<long long>(n) * d) % 2 != 0)
        throw std::invalid_argument("random_regular_graph: n*d must be even");
    std::mt19937_64 rng(seed);
    std::vector<int> stubs(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    for (int v = 0; v < n; ++v)
        for (int k = 0; k < d; ++k) stubs[static_cast<std::size_t>(v) * d + k] = v;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        Graph g(n);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            const int u = stubs[i], v = stubs[i + 1];
            if (u == v || g.has_edge(u, v)) {
                ok = false;
                break;
            }
            g.add_edge(u, v);
        }
        if (ok) return g;
    }
    throw std::runtime_error("random_regular_graph: sampling did not converge");
}

}  // namespace spinsaw
