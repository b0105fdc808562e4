// Two-state spin systems without hard constraints: per-edge interaction
// log-weights, per-vertex field log-weights, and the derived scalar
// parameters the mixing conditions are stated in.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinsaw/graph.hpp"
#include "spinsaw/numeric.hpp"

namespace spinsaw {

enum class Spin : std::int8_t { Plus = +1, Minus = -1 };

inline Spin flipped(Spin s) { return s == Spin::Plus ? Spin::Minus : Spin::Plus; }
inline char spin_char(Spin s) { return s == Spin::Plus ? '+' : '-'; }

// The four interaction log-weights beta(s_u, s_v) of one edge, stored for a
// fixed orientation u -> v. Reading the edge in the opposite direction
// transposes the off-diagonal entries (beta_uv(a,b) = beta_vu(b,a)).
struct EdgePotential {
    double pp = 0.0;  // beta(+,+)
    double pm = 0.0;  // beta(+,-)
    double mp = 0.0;  // beta(-,+)
    double mm = 0.0;  // beta(-,-)

    double operator()(Spin a, Spin b) const {
        if (a == Spin::Plus) return b == Spin::Plus ? pp : pm;
        return b == Spin::Plus ? mp : mm;
    }

    EdgePotential transposed() const { return {pp, mp, pm, mm}; }

    bool finite() const {
        return std::isfinite(pp) && std::isfinite(pm) && std::isfinite(mp) && std::isfinite(mm);
    }

    // Coupling strength: (beta(+,+) + beta(-,-) - beta(-,+) - beta(+,-)) / 4.
    double coupling() const { return 0.25 * (pp + mm - mp - pm); }

    // The two per-edge log-ratio extremes beta(-,-)-beta(+,-) and
    // beta(-,+)-beta(+,+); the edge influence ratio lies between their exps.
    std::pair<double, double> alpha_pair() const { return {mm - pm, mp - pp}; }

    // max(|bc - ad| / ac, |bc - ad| / bd) with a..d the exponentials of the
    // four entries, evaluated in log space so large weights do not overflow.
    double gamma() const {
        const double log_bc = pm + mp;
        const double log_ad = pp + mm;
        if (log_bc == log_ad) return 0.0;
        const double hi = std::max(log_bc, log_ad);
        const double lo_denom = std::min(pp + mp, pm + mm);  // min(log ac, log bd)
        return std::exp(hi - lo_denom) * (-std::expm1(-std::fabs(log_bc - log_ad)));
    }
};

// Per-vertex field log-weights h(+), h(-).
struct VertexField {
    double plus = 0.0;
    double minus = 0.0;

    double operator()(Spin s) const { return s == Spin::Plus ? plus : minus; }
    bool finite() const { return std::isfinite(plus) && std::isfinite(minus); }

    // External field B = (h(+) - h(-)) / 2.
    double bias() const { return 0.5 * (plus - minus); }

    // log(lambda) = -2B; lambda weights the minus branch of the recursion.
    double log_lambda() const { return minus - plus; }
};

// Assignment of spins to a subset of vertices.
class PartialConfig {
public:
    PartialConfig() = default;
    explicit PartialConfig(int n) : spin_(static_cast<std::size_t>(n), 0) {}

    int size() const { return static_cast<int>(spin_.size()); }

    void fix(int v, Spin s) {
        auto& slot = spin_.at(static_cast<std::size_t>(v));
        if (slot == 0) ++count_;
        slot = static_cast<std::int8_t>(s);
    }

    void release(int v) {
        auto& slot = spin_.at(static_cast<std::size_t>(v));
        if (slot != 0) --count_;
        slot = 0;
    }

    bool fixed(int v) const { return spin_.at(static_cast<std::size_t>(v)) != 0; }

    Spin spin(int v) const {
        const auto s = spin_.at(static_cast<std::size_t>(v));
        if (s == 0) throw std::logic_error("PartialConfig: vertex is not fixed");
        return static_cast<Spin>(s);
    }

    int fixed_count() const { return count_; }

private:
    std::vector<std::int8_t> spin_;
    int count_ = 0;
};

// Immutable after construction; one potential per undirected edge (stored in
// the graph's (u,v), u < v orientation) and one field per vertex.
class SpinSystem {
public:
    SpinSystem(Graph graph, std::vector<EdgePotential> edge_potentials,
               std::vector<VertexField> vertex_fields)
        : graph_(std::move(graph)),
          edge_pot_(std::move(edge_potentials)),
          field_(std::move(vertex_fields)) {
        if (static_cast<int>(edge_pot_.size()) != graph_.edge_count())
            throw std::invalid_argument("SpinSystem: one potential per edge required");
        if (static_cast<int>(field_.size()) != graph_.vertex_count())
            throw std::invalid_argument("SpinSystem: one field per vertex required");
    }

    const Graph& graph() const { return graph_; }
    int vertex_count() const { return graph_.vertex_count(); }
    int edge_count() const { return graph_.edge_count(); }

    // Potential in the stored (u,v), u < v orientation.
    const EdgePotential& stored_potential(int edge_id) const {
        return edge_pot_.at(static_cast<std::size_t>(edge_id));
    }

    // Potential oriented so the first spin argument belongs to `from`.
    EdgePotential potential_from(int edge_id, int from) const {
        const auto& e = graph_.edges().at(static_cast<std::size_t>(edge_id));
        if (e.first == from) return edge_pot_[static_cast<std::size_t>(edge_id)];
        if (e.second == from) return edge_pot_[static_cast<std::size_t>(edge_id)].transposed();
        throw std::invalid_argument("SpinSystem: vertex is not an endpoint of the edge");
    }

    EdgePotential potential_between(int from, int to) const {
        const auto id = graph_.edge_index(from, to);
        if (!id) throw std::invalid_argument("SpinSystem: no such edge");
        return potential_from(*id, from);
    }

    const VertexField& field(int v) const { return field_.at(static_cast<std::size_t>(v)); }

    // Total log-weight of a full configuration.
    double log_weight(const std::vector<Spin>& config) const {
        double acc = 0.0;
        for (int e = 0; e < edge_count(); ++e) {
            const auto [u, v] = graph_.edges()[static_cast<std::size_t>(e)];
            acc += edge_pot_[static_cast<std::size_t>(e)](config[static_cast<std::size_t>(u)],
                                                          config[static_cast<std::size_t>(v)]);
        }
        for (int v = 0; v < vertex_count(); ++v)
            acc += field_[static_cast<std::size_t>(v)](config[static_cast<std::size_t>(v)]);
        return acc;
    }

private:
    Graph graph_;
    std::vector<EdgePotential> edge_pot_;
    std::vector<VertexField> field_;
};

// beta(s,s') = J*s*s' per edge and h(s) = B*s per vertex.
inline SpinSystem make_ising(Graph graph, const std::vector<double>& couplings,
                             const std::vector<double>& fields) {
    if (static_cast<int>(couplings.size()) != graph.edge_count())
        throw std::invalid_argument("make_ising: one coupling per edge required");
    if (static_cast<int>(fields.size()) != graph.vertex_count())
        throw std::invalid_argument("make_ising: one field per vertex required");
    std::vector<EdgePotential> pots;
    pots.reserve(couplings.size());
    for (double j : couplings) pots.push_back({j, -j, -j, j});
    std::vector<VertexField> vf;
    vf.reserve(fields.size());
    for (double b : fields) vf.push_back({b, -b});
    return SpinSystem(std::move(graph), std::move(pots), std::move(vf));
}

inline SpinSystem make_uniform_ising(Graph graph, double coupling, double field) {
    std::vector<double> js(static_cast<std::size_t>(graph.edge_count()), coupling);
    std::vector<double> bs(static_cast<std::size_t>(graph.vertex_count()), field);
    return make_ising(std::move(graph), js, bs);
}

struct ValidationIssue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }

    std::string to_string() const {
        if (ok()) return "valid";
        std::ostringstream os;
        for (const auto& i : issues) os << i.location << ": " << i.message << "\n";
        return os.str();
    }
};

// A non-finite entry signals a hard constraint (or a missing value loaded as
// NaN), both outside the model class handled here.
inline ValidationReport validate_system(const SpinSystem& sys) {
    ValidationReport rep;
    const auto& g = sys.graph();
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& pot = sys.stored_potential(e);
        const auto [u, v] = g.edges()[static_cast<std::size_t>(e)];
        const std::string loc = "edge (" + std::to_string(u) + "," + std::to_string(v) + ")";
        const double vals[4] = {pot.pp, pot.pm, pot.mp, pot.mm};
        const char* names[4] = {"beta(+,+)", "beta(+,-)", "beta(-,+)", "beta(-,-)"};
        for (int k = 0; k < 4; ++k) {
            if (std::isnan(vals[k]))
                rep.issues.push_back({loc, std::string(names[k]) + " is missing (NaN)"});
            else if (std::isinf(vals[k]))
                rep.issues.push_back({loc, std::string("hard constraint at ") + loc + ": " +
                                               names[k] + " is infinite"});
        }
    }
    for (int v = 0; v < g.vertex_count(); ++v) {
        const auto& f = sys.field(v);
        const std::string loc = "vertex " + std::to_string(v);
        if (std::isnan(f.plus) || std::isnan(f.minus))
            rep.issues.push_back({loc, "field entry is missing (NaN)"});
        else if (std::isinf(f.plus) || std::isinf(f.minus))
            rep.issues.push_back({loc, "hard constraint: field entry is infinite"});
    }
    return rep;
}

// Scalar parameters of the mixing conditions. Aggregates over empty sets are
// left unset rather than silently reported as zero.
struct SystemParameters {
    std::optional<double> max_coupling;  // J = max |J_ij|
    std::optional<double> field_min;     // min B_i
    std::optional<double> field_max;     // max B_i
    std::optional<double> alpha_min;
    std::optional<double> alpha_max;
    std::optional<double> gamma;
};

inline SystemParameters derive_parameters(const SpinSystem& sys) {
    SystemParameters p;
    for (int e = 0; e < sys.edge_count(); ++e) {
        // Tree walks traverse an edge in both directions, so the aggregates
        // cover both orientations; this also makes them relabel-invariant.
        const auto& pot = sys.stored_potential(e);
        const EdgePotential rev = pot.transposed();
        const double j = std::fabs(pot.coupling());
        const auto [a1, a2] = pot.alpha_pair();
        const auto [a3, a4] = rev.alpha_pair();
        const double gam = std::max(pot.gamma(), rev.gamma());
        p.max_coupling = std::max(p.max_coupling.value_or(-kInf), j);
        p.alpha_max = std::max({p.alpha_max.value_or(-kInf), a1, a2, a3, a4});
        p.alpha_min = std::min({p.alpha_min.value_or(kInf), a1, a2, a3, a4});
        p.gamma = std::max(p.gamma.value_or(-kInf), gam);
    }
    for (int v = 0; v < sys.vertex_count(); ++v) {
        const double b = sys.field(v).bias();
        p.field_min = std::min(p.field_min.value_or(kInf), b);
        p.field_max = std::max(p.field_max.value_or(-kInf), b);
    }
    return p;
}

}  // namespace spinsaw
