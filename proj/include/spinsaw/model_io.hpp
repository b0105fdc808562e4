// Model file format: a JSON document with either explicit per-edge
// log-weights or the Ising shorthand, plus condition-string parsing used by
// the command-line tools.
//
//   { "n": 4,
//     "edges":  [[u, v, beta_pp, beta_pm, beta_mp, beta_mm], ...],
//     "fields": [[v, h_plus, h_minus], ...] }            // unlisted: (0, 0)
//
//   { "n": 4, "ising": { "edges": [[u, v, J], ...], "B": [b0, ...] } }
//     // "B" may also be a single number applied to every vertex
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsaw/spin_system.hpp"

namespace spinsaw {

struct ModelFormatError : std::runtime_error {
    explicit ModelFormatError(const std::string& what) : std::runtime_error(what) {}
};

inline SpinSystem parse_model(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelFormatError("model: top level must be an object");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw ModelFormatError("model: missing integer field 'n'");
    const int n = j["n"].get<int>();
    if (n < 0) throw ModelFormatError("model: 'n' must be nonnegative");

    const bool has_ising = j.contains("ising");
    const bool has_edges = j.contains("edges") || j.contains("fields");
    if (has_ising && has_edges)
        throw ModelFormatError("model: give either 'ising' or 'edges'/'fields', not both");

    try {
        if (has_ising) {
            const auto& is = j["ising"];
            Graph g(n);
            std::vector<double> couplings;
            if (is.contains("edges")) {
                for (const auto& row : is["edges"]) {
                    if (!row.is_array() || row.size() != 3)
                        throw ModelFormatError("model: ising edge rows are [u, v, J]");
                    g.add_edge(row[0].get<int>(), row[1].get<int>());
                    couplings.push_back(row[2].get<double>());
                }
            }
            std::vector<double> fields(static_cast<std::size_t>(n), 0.0);
            if (is.contains("B")) {
                if (is["B"].is_number()) {
                    fields.assign(static_cast<std::size_t>(n), is["B"].get<double>());
                } else {
                    if (static_cast<int>(is["B"].size()) != n)
                        throw ModelFormatError("model: ising 'B' must list one value per vertex");
                    for (int v = 0; v < n; ++v) fields[static_cast<std::size_t>(v)] =
                        is["B"][static_cast<std::size_t>(v)].get<double>();
                }
            }
            return make_ising(std::move(g), couplings, fields);
        }

        Graph g(n);
        std::vector<EdgePotential> pots;
        if (j.contains("edges")) {
            for (const auto& row : j["edges"]) {
                if (!row.is_array() || row.size() != 6)
                    throw ModelFormatError(
                        "model: edge rows are [u, v, beta_pp, beta_pm, beta_mp, beta_mm]");
                const int u = row[0].get<int>();
                const int v = row[1].get<int>();
                EdgePotential p{row[2].get<double>(), row[3].get<double>(), row[4].get<double>(),
                                row[5].get<double>()};
                // Stored orientation is (min, max); transpose if given reversed.
                if (u > v) p = p.transposed();
                g.add_edge(u, v);
                pots.push_back(p);
            }
        }
        std::vector<VertexField> fields(static_cast<std::size_t>(n));
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        if (j.contains("fields")) {
            for (const auto& row : j["fields"]) {
                if (!row.is_array() || row.size() != 3)
                    throw ModelFormatError("model: field rows are [v, h_plus, h_minus]");
                const int v = row[0].get<int>();
                if (v < 0 || v >= n) throw ModelFormatError("model: field vertex out of range");
                if (seen[static_cast<std::size_t>(v)])
                    throw ModelFormatError("model: duplicate field for vertex " +
                                           std::to_string(v));
                seen[static_cast<std::size_t>(v)] = 1;
                fields[static_cast<std::size_t>(v)] = {row[1].get<double>(),
                                                       row[2].get<double>()};
            }
        }
        return SpinSystem(std::move(g), std::move(pots), std::move(fields));
    } catch (const std::invalid_argument& e) {
        throw ModelFormatError(std::string("model: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ModelFormatError(std::string("model: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("model: ") + e.what());
    }
}

inline SpinSystem load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelFormatError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError("cannot parse model file " + path + ": " + e.what());
    }
    return parse_model(j);
}

inline nlohmann::json model_to_json(const SpinSystem& sys) {
    nlohmann::json j;
    j["n"] = sys.vertex_count();
    auto edges = nlohmann::json::array();
    for (int e = 0; e < sys.edge_count(); ++e) {
        const auto [u, v] = sys.graph().edges()[static_cast<std::size_t>(e)];
        const auto& p = sys.stored_potential(e);
        edges.push_back({u, v, p.pp, p.pm, p.mp, p.mm});
    }
    j["edges"] = std::move(edges);
    auto fields = nlohmann::json::array();
    for (int v = 0; v < sys.vertex_count(); ++v)
        fields.push_back({v, sys.field(v).plus, sys.field(v).minus});
    j["fields"] = std::move(fields);
    return j;
}

inline void save_model(const SpinSystem& sys, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelFormatError("cannot write model file: " + path);
    out << model_to_json(sys).dump(2) << "\n";
}

// Conditions are written "v:+,w:-" (whitespace ignored).
inline PartialConfig parse_condition(const std::string& text, int n) {
    PartialConfig cfg(n);
    std::string tok;
    auto flush = [&]() {
        if (tok.empty()) return;
        const auto colon = tok.find(':');
        if (colon == std::string::npos || colon + 2 != tok.size())
            throw ModelFormatError("condition: entries look like '3:+' or '3:-', got '" + tok +
                                   "'");
        int v = 0;
        try {
            v = std::stoi(tok.substr(0, colon));
        } catch (const std::exception&) {
            throw ModelFormatError("condition: bad vertex in '" + tok + "'");
        }
        if (v < 0 || v >= n) throw ModelFormatError("condition: vertex out of range in '" + tok + "'");
        const char s = tok[colon + 1];
        if (s != '+' && s != '-')
            throw ModelFormatError("condition: spin must be '+' or '-' in '" + tok + "'");
        if (cfg.fixed(v)) throw ModelFormatError("condition: vertex repeated in '" + tok + "'");
        cfg.fix(v, s == '+' ? Spin::Plus : Spin::Minus);
        tok.clear();
    };
    for (char c : text) {
        if (c == ',') {
            flush();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            tok.push_back(c);
        }
    }
    flush();
    return cfg;
}

}  // namespace spinsaw
