// Self-avoiding-walk trees: the tree of self-avoiding walks from a root
// vertex, with cycle-closing copies fixed by an edge-order rule, boundary
// copies fixed and pruned, and optional depth truncation.
#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinsaw/spin_system.hpp"

namespace spinsaw {

enum class NodeStatus : std::uint8_t {
    Free,       // participates in the recursion
    FixedPlus,  // boundary copy or cycle-closing copy pinned to +
    FixedMinus, // boundary copy or cycle-closing copy pinned to -
    Truncated,  // free node cut at the depth limit (had unbuilt children)
};

inline bool is_fixed(NodeStatus s) {
    return s == NodeStatus::FixedPlus || s == NodeStatus::FixedMinus;
}

struct SawNode {
    int origin = -1;       // vertex of the source graph this node copies
    int parent = -1;       // node index, -1 at the root
    int edge = -1;         // source-graph edge index to the parent
    int child_begin = 0;   // children occupy a contiguous index block
    int child_end = 0;
    int depth = 0;
    NodeStatus status = NodeStatus::Free;
};

// Total order on edges extending the shared-vertex rank-sum comparison:
// rank sums first, then lexicographic on the sorted endpoint pair.
inline bool edge_order_less(std::pair<int, int> a, std::pair<int, int> b, const Graph& g) {
    const long long sa = static_cast<long long>(g.order_rank(a.first)) + g.order_rank(a.second);
    const long long sb = static_cast<long long>(g.order_rank(b.first)) + g.order_rank(b.second);
    if (sa != sb) return sa < sb;
    auto norm = [](std::pair<int, int> e) {
        if (e.first > e.second) std::swap(e.first, e.second);
        return e;
    };
    return norm(a) < norm(b);
}

// Immutable after construction. Nodes are stored in depth-first order, so a
// child index always exceeds its parent's; evaluating the node array in
// reverse index order is a valid post-order sweep.
class SawTree {
public:
    SawTree(const SpinSystem& system, int root_vertex, PartialConfig boundary,
            std::optional<int> depth_limit, std::vector<SawNode> nodes)
        : system_(&system),
          root_vertex_(root_vertex),
          boundary_(std::move(boundary)),
          depth_limit_(depth_limit),
          nodes_(std::move(nodes)) {}

    const SpinSystem& system() const { return *system_; }
    int root_vertex() const { return root_vertex_; }
    const PartialConfig& boundary() const { return boundary_; }
    std::optional<int> depth_limit() const { return depth_limit_; }

    const std::vector<SawNode>& nodes() const { return nodes_; }
    const SawNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    std::size_t size() const { return nodes_.size(); }
    const SawNode& root() const { return nodes_.front(); }

private:
    const SpinSystem* system_;
    int root_vertex_;
    PartialConfig boundary_;
    std::optional<int> depth_limit_;
    std::vector<SawNode> nodes_;
};

// Builds T_saw(root). Children of a node whose walk ends at u are, in order:
// the free extensions to neighbors not on the walk (ascending label), then
// one fixed leaf per neighbor that closes a cycle (ascending label). A copy
// of a boundary vertex is fixed to its boundary spin and gets no children.
// A cycle-closing copy of w is fixed to + when the edge ending the cycle
// exceeds, in the edge order, the walk edge leaving w, and to - otherwise.
// With a depth limit, nodes at the limit that still had children to build
// are tagged Truncated; nodes that were leaves anyway stay Free.
inline SawTree build_saw_tree(const SpinSystem& system, int root,
                              const PartialConfig& boundary = {},
                              std::optional<int> depth_limit = std::nullopt) {
    const Graph& g = system.graph();
    const int n = g.vertex_count();
    if (root < 0 || root >= n) throw std::out_of_range("build_saw_tree: bad root vertex");
    if (boundary.size() != 0 && boundary.size() != n)
        throw std::invalid_argument("build_saw_tree: boundary size mismatch");
    if (depth_limit && *depth_limit < 0)
        throw std::invalid_argument("build_saw_tree: negative depth limit");

    PartialConfig bc = boundary.size() == 0 ? PartialConfig(n) : boundary;
    std::vector<SawNode> nodes;
    nodes.reserve(64);

    SawNode root_node;
    root_node.origin = root;
    root_node.depth = 0;
    if (bc.fixed(root))
        root_node.status =
            bc.spin(root) == Spin::Plus ? NodeStatus::FixedPlus : NodeStatus::FixedMinus;
    nodes.push_back(root_node);

    if (is_fixed(root_node.status))
        return SawTree(system, root, std::move(bc), depth_limit, std::move(nodes));

    // walk_pos[v]: position of v on the current walk, -1 if absent.
    std::vector<int> walk_pos(static_cast<std::size_t>(n), -1);
    std::vector<int> walk;  // origins along the current walk

    struct Frame {
        int node;
        int cursor;  // next child index to consider descending into
    };
    std::vector<Frame> stack;

    struct Candidate {
        int origin;
        int edge;
        NodeStatus status;
    };
    std::vector<Candidate> free_kids, cycle_kids;

    auto visit = [&](int node_idx) {
        // Copy the fields needed below: pushing children may reallocate.
        const int u = nodes[static_cast<std::size_t>(node_idx)].origin;
        const int depth = nodes[static_cast<std::size_t>(node_idx)].depth;
        const int parent = nodes[static_cast<std::size_t>(node_idx)].parent;
        walk_pos[static_cast<std::size_t>(u)] = depth;
        walk.push_back(u);

        const int pred = parent >= 0 ? nodes[static_cast<std::size_t>(parent)].origin : -1;
        free_kids.clear();
        cycle_kids.clear();
        for (const HalfEdge& h : g.neighbors(u)) {
            const int w = h.to;
            if (w == pred) continue;
            const int pos = walk_pos[static_cast<std::size_t>(w)];
            if (pos < 0) {
                NodeStatus st = NodeStatus::Free;
                if (bc.fixed(w))
                    st = bc.spin(w) == Spin::Plus ? NodeStatus::FixedPlus : NodeStatus::FixedMinus;
                free_kids.push_back({w, h.edge, st});
            } else {
                // w is on the walk: the edge (u,w) closes the cycle that the
                // walk edge (w, successor-of-w) started.
                const int succ = walk[static_cast<std::size_t>(pos) + 1];
                const bool ending_larger = edge_order_less({w, succ}, {u, w}, g);
                cycle_kids.push_back(
                    {w, h.edge, ending_larger ? NodeStatus::FixedPlus : NodeStatus::FixedMinus});
            }
        }

        if (depth_limit && depth >= *depth_limit) {
            if (!free_kids.empty() || !cycle_kids.empty())
                nodes[static_cast<std::size_t>(node_idx)].status = NodeStatus::Truncated;
            return;  // leaf at the limit; nothing allocated
        }

        // Neighbor iteration is in ascending label order already, so each
        // group is sorted; free extensions precede cycle closures.
        const int begin = static_cast<int>(nodes.size());
        auto emit = [&](const Candidate& c) {
            SawNode child;
            child.origin = c.origin;
            child.parent = node_idx;
            child.edge = c.edge;
            child.depth = depth + 1;
            child.status = c.status;
            nodes.push_back(child);
        };
        for (const auto& c : free_kids) emit(c);
        for (const auto& c : cycle_kids) emit(c);
        nodes[static_cast<std::size_t>(node_idx)].child_begin = begin;
        nodes[static_cast<std::size_t>(node_idx)].child_end = static_cast<int>(nodes.size());
    };

    visit(0);
    stack.push_back({0, nodes[0].child_begin});
    while (!stack.empty()) {
        Frame& fr = stack.back();
        const SawNode& nd = nodes[static_cast<std::size_t>(fr.node)];
        if (fr.cursor >= nd.child_end) {
            walk_pos[static_cast<std::size_t>(nd.origin)] = -1;
            walk.pop_back();
            stack.pop_back();
            continue;
        }
        const int child = fr.cursor++;
        if (nodes[static_cast<std::size_t>(child)].status != NodeStatus::Free) continue;
        visit(child);
        stack.push_back({child, nodes[static_cast<std::size_t>(child)].child_begin});
    }

    return SawTree(system, root, std::move(bc), depth_limit, std::move(nodes));
}

struct TreeStats {
    std::size_t node_count = 0;
    std::vector<std::size_t> sphere_sizes;  // indexed by depth
    int max_depth = 0;
};

inline TreeStats tree_stats(const SawTree& t) {
    TreeStats s;
    s.node_count = t.size();
    for (const SawNode& nd : t.nodes()) {
        if (static_cast<std::size_t>(nd.depth) >= s.sphere_sizes.size())
            s.sphere_sizes.resize(static_cast<std::size_t>(nd.depth) + 1, 0);
        ++s.sphere_sizes[static_cast<std::size_t>(nd.depth)];
        s.max_depth = std::max(s.max_depth, nd.depth);
    }
    return s;
}

inline const char* status_label(NodeStatus s) {
    switch (s) {
        case NodeStatus::Free: return "free";
        case NodeStatus::FixedPlus: return "fixed(+)";
        case NodeStatus::FixedMinus: return "fixed(-)";
        case NodeStatus::Truncated: return "truncated";
    }
    return "?";
}

// Indented text outline, one node per line, children in stored order.
inline std::string to_outline(const SawTree& t) {
    std::ostringstream os;
    std::vector<int> order;
    order.push_back(0);
    while (!order.empty()) {
        const int i = order.back();
        order.pop_back();
        const SawNode& nd = t.node(i);
        for (int k = 0; k < nd.depth; ++k) os << "  ";
        os << "v" << nd.origin << " [" << status_label(nd.status) << "]\n";
        for (int c = nd.child_end - 1; c >= nd.child_begin; --c) order.push_back(c);
    }
    return os.str();
}

inline std::string to_dot(const SawTree& t) {
    std::ostringstream os;
    os << "digraph sawtree {\n  node [shape=circle];\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        const SawNode& nd = t.node(static_cast<int>(i));
        os << "  n" << i << " [label=\"" << nd.origin;
        if (nd.status == NodeStatus::FixedPlus) os << "+";
        if (nd.status == NodeStatus::FixedMinus) os << "-";
        if (nd.status == NodeStatus::Truncated) os << "~";
        os << "\"];\n";
        if (nd.parent >= 0) os << "  n" << nd.parent << " -> n" << i << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace spinsaw
