// Command-line surface: model I/O, exact and approximate partition
// functions, marginals, tree exports, sparsity metrics, condition checks,
// decay scans, and the inequality property suites.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinsaw/spinsaw.hpp"

using namespace spinsaw;

namespace {

// Exit codes, one per failure family so scripts can tell them apart.
enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kFileError = 3,
    kCapExceeded = 4,
    kDomainError = 5,
};

std::string full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string rounded(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void print_value(std::ostream& os, const std::string& name, double x) {
    os << name << "  " << full(x) << "  " << rounded(x) << "\n";
}

void print_value(std::ostream& os, const std::string& name, const std::string& s) {
    os << name << "  " << s << "\n";
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ModelFormatError("cannot open output file: " + path);
    return file;
}

int env_workers() {
    const char* raw = std::getenv("SPINSAW_WORKERS");
    if (!raw) return 1;
    const int w = std::atoi(raw);
    return w >= 1 ? w : 1;
}

double resolve_d(const std::string& d_flag, int radius, const SpinSystem& sys) {
    if (d_flag == "auto") {
        if (radius < 1)
            throw std::invalid_argument("--d auto requires --radius >= 1");
        return max_avg_degree(sys.graph(), radius);
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(d_flag, &used);
        if (used != d_flag.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("--d expects a number or 'auto', got '" + d_flag + "'");
    }
}

nlohmann::json fptas_report(const FptasResult& res) {
    nlohmann::json j;
    j["log_z_hat"] = res.log_z_hat;
    j["base_log_weight"] = res.base_log_weight;
    j["epsilon"] = res.epsilon;
    j["regime"] = regime_name(res.regime);
    j["guarantee_met"] = res.guarantee_met;
    j["total_nodes"] = res.total_nodes;
    auto rows = nlohmann::json::array();
    for (const auto& est : res.per_vertex) {
        rows.push_back({{"vertex", est.vertex},
                        {"p_hat", est.p_hat},
                        {"depth", est.depth},
                        {"error_bound", est.error_bound},
                        {"nodes", est.nodes}});
    }
    j["per_vertex"] = std::move(rows);
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic marginals and partition functions for two-state spin systems"};
    app.require_subcommand(1);

    std::string model_path, condition_text, output_path;
    std::string d_flag = "3";
    int radius = 0;

    // exact-z
    auto* cmd_exact = app.add_subcommand("exact-z", "exact log partition function by enumeration");
    int oracle_cap = kOracleDefaultCap;
    cmd_exact->add_option("--model", model_path, "model file")->required();
    cmd_exact->add_option("--condition", condition_text, "fixed spins, e.g. '0:+,3:-'");
    cmd_exact->add_option("--cap", oracle_cap, "free-vertex cap for the enumeration");

    // approx-z
    auto* cmd_approx = app.add_subcommand("approx-z", "deterministic approximate log partition function");
    double epsilon = 0.1, init_value = 0.5;
    int depth_override = 0;
    bool verify = false, global_depth = false;
    cmd_approx->add_option("--model", model_path, "model file")->required();
    cmd_approx->add_option("--epsilon", epsilon, "relative error target")->required();
    cmd_approx->add_option("--d", d_flag, "sparsity parameter, or 'auto'");
    cmd_approx->add_option("--radius", radius, "radius used with --d auto");
    cmd_approx->add_option("--depth-override", depth_override, "fixed truncation depth (>=1)");
    cmd_approx->add_option("--init", init_value, "truncation initializer in [0,1]");
    cmd_approx->add_flag("--global-depth", global_depth, "one depth for all vertices");
    cmd_approx->add_flag("--verify", verify, "compare against the enumeration oracle (size-gated)");
    cmd_approx->add_option("--cap", oracle_cap, "oracle cap used with --verify");
    cmd_approx->add_option("--output", output_path, "write the JSON report here");

    // marginal
    auto* cmd_marginal = app.add_subcommand("marginal", "root marginal through the self-avoiding tree");
    int vertex = 0, trunc_depth = 0;
    cmd_marginal->add_option("--model", model_path, "model file")->required();
    cmd_marginal->add_option("--vertex", vertex, "target vertex")->required();
    cmd_marginal->add_option("--condition", condition_text, "fixed spins");
    cmd_marginal->add_option("--depth", trunc_depth, "truncation depth; 0 = exact");
    cmd_marginal->add_option("--init", init_value, "truncation initializer");

    // saw-tree
    auto* cmd_tree = app.add_subcommand("saw-tree", "build and export a self-avoiding tree");
    std::string format = "outline";
    bool with_stats = false;
    int depth_limit = 0;
    cmd_tree->add_option("--model", model_path, "model file")->required();
    cmd_tree->add_option("--vertex", vertex, "root vertex")->required();
    cmd_tree->add_option("--condition", condition_text, "fixed spins");
    cmd_tree->add_option("--depth-limit", depth_limit, "stop construction at this depth; 0 = full");
    cmd_tree->add_option("--format", format, "outline or dot")
        ->check(CLI::IsMember({"outline", "dot"}));
    cmd_tree->add_flag("--stats", with_stats, "print node counts and sphere sizes");
    cmd_tree->add_option("--output", output_path, "write the export here");

    // metrics
    auto* cmd_metrics = app.add_subcommand("metrics", "path-density sparsity metrics");
    bool check_props = false;
    int metrics_vertex = -1;
    cmd_metrics->add_option("--model", model_path, "model file")->required();
    cmd_metrics->add_option("--radius", radius, "path length budget")->required();
    cmd_metrics->add_option("--vertex", metrics_vertex, "restrict to one vertex");
    cmd_metrics->add_flag("--check-props", check_props,
                          "verify the composition/sphere/ball bounds for j,l in 1..3");

    // check-conditions
    auto* cmd_check = app.add_subcommand("check-conditions", "mixing-condition verdict and thresholds");
    bool relaxed = false;
    cmd_check->add_option("--model", model_path, "model file")->required();
    cmd_check->add_option("--d", d_flag, "sparsity parameter, or 'auto'");
    cmd_check->add_option("--radius", radius, "radius used with --d auto");
    cmd_check->add_flag("--relaxed", relaxed, "per-vertex field condition (bounded degree)");

    // decay-scan
    auto* cmd_decay = app.add_subcommand("decay-scan", "empirical decay table as CSV");
    int t_min = 1, t_max = 5, exhaustive_limit = 16;
    std::string strategy = "extremal";
    cmd_decay->add_option("--model", model_path, "model file")->required();
    cmd_decay->add_option("--vertex", vertex, "probe vertex")->required();
    cmd_decay->add_option("--t-min", t_min, "first distance");
    cmd_decay->add_option("--t-max", t_max, "last distance");
    cmd_decay->add_option("--d", d_flag, "sparsity parameter, or 'auto'");
    cmd_decay->add_option("--radius", radius, "radius used with --d auto");
    cmd_decay->add_option("--strategy", strategy, "extremal or exhaustive")
        ->check(CLI::IsMember({"extremal", "exhaustive"}));
    cmd_decay->add_option("--exhaustive-limit", exhaustive_limit,
                          "max sphere size for the exhaustive sweep");
    cmd_decay->add_option("--output", output_path, "write the CSV here");

    // verify-props
    auto* cmd_props = app.add_subcommand("verify-props", "random-sample inequality suites");
    int samples = 10000;
    std::uint64_t seed = 1;
    cmd_props->add_option("--samples", samples, "samples per inequality");
    cmd_props->add_option("--seed", seed, "random seed");

    // generate
    auto* cmd_gen = app.add_subcommand("generate", "write a model file for a generated graph");
    std::string kind = "path";
    int gen_n = 8, gen_degree = 3, gen_depth = 3;
    double gen_prob = 0.2, ising_j = 0.0, ising_b = 0.0;
    std::vector<double> random_beta, random_field;
    cmd_gen->add_option("--kind", kind, "path|cycle|complete|random-regular|erdos-renyi|complete-binary-tree|regular-tree")
        ->check(CLI::IsMember({"path", "cycle", "complete", "random-regular", "erdos-renyi",
                               "complete-binary-tree", "regular-tree"}));
    cmd_gen->add_option("--n", gen_n, "vertex count (path/cycle/complete/random graphs)");
    cmd_gen->add_option("--degree", gen_degree, "degree for random-regular / regular-tree");
    cmd_gen->add_option("--prob", gen_prob, "edge probability for erdos-renyi");
    cmd_gen->add_option("--depth", gen_depth, "depth for tree kinds");
    cmd_gen->add_option("--seed", seed, "random seed");
    cmd_gen->add_option("--ising-j", ising_j, "uniform coupling");
    cmd_gen->add_option("--ising-b", ising_b, "uniform field");
    cmd_gen->add_option("--random-beta", random_beta, "lo hi: uniform random interaction entries")
        ->expected(2);
    cmd_gen->add_option("--random-field", random_field, "lo hi: uniform random field entries")
        ->expected(2);
    cmd_gen->add_option("--output", output_path, "model file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*cmd_exact) {
            const SpinSystem sys = load_model(model_path);
            const PartialConfig cond = parse_condition(condition_text, sys.vertex_count());
            print_value(std::cout, "log_Z",
                        exact_log_partition(sys, cond, oracle_cap));
            return kOk;
        }

        if (*cmd_approx) {
            const SpinSystem sys = load_model(model_path);
            FptasConfig cfg;
            cfg.epsilon = epsilon;
            cfg.init_value = init_value;
            cfg.per_vertex_depth = !global_depth;
            cfg.workers = env_workers();
            if (depth_override > 0) cfg.depth_override = depth_override;
            cfg.d_parameter = resolve_d(d_flag, radius, sys);
            const FptasResult res = approx_log_partition(sys, cfg);
            nlohmann::json report = fptas_report(res);
            bool ok = true;
            if (verify) {
                const double truth = exact_log_partition(sys, {}, oracle_cap);
                const double err = std::fabs(res.log_z_hat - truth);
                report["oracle_log_z"] = truth;
                report["abs_log_error"] = err;
                report["within_epsilon"] = err <= epsilon;
                ok = err <= epsilon;
            }
            std::ofstream file;
            open_output(file, output_path) << report.dump(2) << "\n";
            return ok ? kOk : kCheckFailed;
        }

        if (*cmd_marginal) {
            const SpinSystem sys = load_model(model_path);
            const PartialConfig cond = parse_condition(condition_text, sys.vertex_count());
            MarginalResult m;
            if (trunc_depth > 0) {
                const SawTree t = build_saw_tree(sys, vertex, cond, trunc_depth);
                m = truncated_root_marginal(t, trunc_depth, init_value);
            } else {
                m = exact_root_marginal(build_saw_tree(sys, vertex, cond));
            }
            print_value(std::cout, "p_plus", m.p_plus);
            print_value(std::cout, "log_ratio", m.log_ratio);
            print_value(std::cout, "depth",
                        m.depth_used ? std::to_string(*m.depth_used) : std::string("exact"));
            return kOk;
        }

        if (*cmd_tree) {
            const SpinSystem sys = load_model(model_path);
            const PartialConfig cond = parse_condition(condition_text, sys.vertex_count());
            const std::optional<int> limit =
                depth_limit > 0 ? std::optional<int>(depth_limit) : std::nullopt;
            const SawTree t = build_saw_tree(sys, vertex, cond, limit);
            std::ofstream file;
            std::ostream& os = open_output(file, output_path);
            os << (format == "dot" ? to_dot(t) : to_outline(t));
            if (with_stats) {
                const TreeStats st = tree_stats(t);
                os << "nodes " << st.node_count << "\n";
                os << "max_depth " << st.max_depth << "\n";
                os << "spheres";
                for (std::size_t s : st.sphere_sizes) os << " " << s;
                os << "\n";
            }
            return kOk;
        }

        if (*cmd_metrics) {
            const SpinSystem sys = load_model(model_path);
            const Graph& g = sys.graph();
            if (radius < 1) throw std::invalid_argument("metrics: --radius must be >= 1");
            std::cout << "vertex  degree  path_density  avg_path_degree\n";
            const int lo = metrics_vertex >= 0 ? metrics_vertex : 0;
            const int hi = metrics_vertex >= 0 ? metrics_vertex + 1 : g.vertex_count();
            for (int v = lo; v < hi; ++v) {
                const SparsityReport r = sparsity_report(g, v, radius);
                std::cout << v << "  " << g.degree(v) << "  " << full(r.path_density) << "  "
                          << full(r.avg_path_degree) << "\n";
            }
            print_value(std::cout, "max_avg_degree", max_avg_degree(g, radius));
            if (!check_props) return kOk;

            bool all_ok = true;
            // composition bound
            for (int l = 1; l <= 3; ++l) {
                double worst = 0.0;
                for (int u = 0; u < g.vertex_count(); ++u)
                    worst = std::max(worst, maximal_path_density(g, u, l) - g.degree(u));
                for (int j = 1; j <= 3; ++j)
                    for (int v = 0; v < g.vertex_count(); ++v)
                        if (maximal_path_density(g, v, j * l) > j * worst + g.degree(v) + 1e-9)
                            all_ok = false;
            }
            std::cout << (all_ok ? "PASS" : "FAIL") << " path-density composition bound\n";
            bool spheres_ok = true, balls_ok = true;
            std::vector<TreeStats> stats;
            for (int u = 0; u < g.vertex_count(); ++u)
                stats.push_back(tree_stats(build_saw_tree(sys, u)));
            auto ball_size = [&](int u, int r) {
                std::size_t acc = 0;
                const auto& sp = stats[static_cast<std::size_t>(u)].sphere_sizes;
                for (std::size_t d = 0; d < sp.size() && d <= static_cast<std::size_t>(r); ++d)
                    acc += sp[d];
                return acc;
            };
            for (int l = 1; l <= 3; ++l) {
                for (int v = 0; v < g.vertex_count(); ++v) {
                    const double delta = avg_path_degree(g, v, l);
                    if (delta >= 2.0) {
                        const auto& sp = stats[static_cast<std::size_t>(v)].sphere_sizes;
                        const std::size_t got =
                            static_cast<std::size_t>(l + 1) < sp.size()
                                ? sp[static_cast<std::size_t>(l + 1)]
                                : 0;
                        if (static_cast<double>(got) >
                            g.degree(v) * std::pow(delta - 1.0, l) + 1e-9)
                            spheres_ok = false;
                    }
                }
                std::size_t worst = 0;
                for (int u = 0; u < g.vertex_count(); ++u)
                    worst = std::max(worst, ball_size(u, l));
                for (int j = 1; j <= 3; ++j)
                    for (int v = 0; v < g.vertex_count(); ++v)
                        if (static_cast<double>(ball_size(v, j * l)) >
                            std::pow(static_cast<double>(worst), j) + 1e-9)
                            balls_ok = false;
            }
            std::cout << (spheres_ok ? "PASS" : "FAIL") << " tree sphere bound\n";
            std::cout << (balls_ok ? "PASS" : "FAIL") << " tree ball composition bound\n";
            return (all_ok && spheres_ok && balls_ok) ? kOk : kCheckFailed;
        }

        if (*cmd_check) {
            const SpinSystem sys = load_model(model_path);
            const double d = resolve_d(d_flag, radius, sys);
            const SystemParameters p = derive_parameters(sys);
            auto show = [&](const char* name, const std::optional<double>& v) {
                if (v)
                    print_value(std::cout, name, *v);
                else
                    std::cout << name << "  undefined\n";
            };
            show("J", p.max_coupling);
            show("B_min", p.field_min);
            show("B_max", p.field_max);
            show("alpha_min", p.alpha_min);
            show("alpha_max", p.alpha_max);
            show("gamma", p.gamma);
            print_value(std::cout, "d", d);
            print_value(std::cout, "critical_J", critical_coupling(d));
            if (p.gamma && *p.gamma * (d - 1.0) >= 4.0) {
                print_value(std::cout, "field_threshold_up",
                            field_threshold(d, p.alpha_max.value_or(0.0), *p.gamma));
                print_value(std::cout, "field_threshold_down",
                            -field_threshold(d, -p.alpha_min.value_or(0.0), *p.gamma));
            }
            const DecayBound b =
                relaxed ? classify_mixing_per_vertex(sys, d) : classify_mixing(p, d);
            print_value(std::cout, "regime", regime_name(b.regime));
            if (b.regime != Regime::None) {
                print_value(std::cout, "rate", b.rate);
                print_value(std::cout, "prefactor_per_degree", b.degree_coeff);
                print_value(std::cout, "log_form", b.log_form ? "true" : "false");
            }
            return b.regime != Regime::None ? kOk : kCheckFailed;
        }

        if (*cmd_decay) {
            const SpinSystem sys = load_model(model_path);
            const double d = resolve_d(d_flag, radius, sys);
            if (t_min < 1 || t_max < t_min)
                throw std::invalid_argument("decay-scan: need 1 <= t-min <= t-max");
            std::vector<int> ts;
            for (int t = t_min; t <= t_max; ++t) ts.push_back(t);
            const auto rows = empirical_decay(sys, vertex, ts, d,
                                              strategy == "exhaustive"
                                                  ? BoundaryStrategy::Exhaustive
                                                  : BoundaryStrategy::Extremal,
                                              exhaustive_limit);
            std::ofstream file;
            std::ostream& os = open_output(file, output_path);
            os << "t,observed,bound,regime\n";
            bool ok = true;
            for (const auto& row : rows) {
                const bool log_form = row.regime == Regime::InverseTemperature;
                const double observed = log_form ? row.observed_log_diff : row.observed_diff;
                os << row.t << "," << full(observed) << "," << full(row.bound) << ","
                   << regime_name(row.regime) << "\n";
                if (row.regime != Regime::None && observed > row.bound) ok = false;
            }
            return ok ? kOk : kCheckFailed;
        }

        if (*cmd_props) {
            std::mt19937_64 rng(seed);
            auto logu = [&] {
                return std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
            };
            int bad31 = 0, bad33 = 0, bad35 = 0;
            for (int i = 0; i < samples; ++i)
                if (!lemma31_holds(logu(), logu(), logu(), logu(), logu(), logu())) ++bad31;
            std::uniform_real_distribution<double> beta(-2.0, 2.0);
            for (int i = 0; i < samples; ++i) {
                const EdgePotential pot{beta(rng), beta(rng), beta(rng), beta(rng)};
                if (!lemma33_holds(pot, 1000)) ++bad33;
            }
            std::uniform_int_distribution<int> len(1, 8);
            for (int i = 0; i < samples; ++i) {
                std::vector<double> ls(static_cast<std::size_t>(len(rng)));
                for (auto& l : ls) l = logu();
                if (!lemma35_holds(ls)) ++bad35;
            }
            std::cout << (bad31 == 0 ? "PASS" : "FAIL") << " ratio-contraction inequality ("
                      << samples << " samples, " << bad31 << " violations)\n";
            std::cout << (bad33 == 0 ? "PASS" : "FAIL") << " edge-kernel bound (" << samples
                      << " samples, " << bad33 << " violations)\n";
            std::cout << (bad35 == 0 ? "PASS" : "FAIL") << " product inequality (" << samples
                      << " samples, " << bad35 << " violations)\n";
            return (bad31 + bad33 + bad35) == 0 ? kOk : kCheckFailed;
        }

        if (*cmd_gen) {
            Graph g;
            if (kind == "path")
                g = path_graph(gen_n);
            else if (kind == "cycle")
                g = cycle_graph(gen_n);
            else if (kind == "complete")
                g = complete_graph(gen_n);
            else if (kind == "random-regular")
                g = random_regular_graph(gen_n, gen_degree, seed);
            else if (kind == "erdos-renyi")
                g = erdos_renyi_graph(gen_n, gen_prob, seed);
            else if (kind == "complete-binary-tree")
                g = complete_binary_tree(gen_depth);
            else
                g = regular_tree(gen_degree, gen_depth);

            SpinSystem sys = [&] {
                if (!random_beta.empty() || !random_field.empty()) {
                    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull);
                    const double blo = random_beta.empty() ? 0.0 : random_beta[0];
                    const double bhi = random_beta.empty() ? 0.0 : random_beta[1];
                    const double flo = random_field.empty() ? 0.0 : random_field[0];
                    const double fhi = random_field.empty() ? 0.0 : random_field[1];
                    auto u = [&](double lo, double hi) {
                        return lo == hi ? lo
                                        : std::uniform_real_distribution<double>(lo, hi)(rng);
                    };
                    std::vector<EdgePotential> pots;
                    for (int e = 0; e < g.edge_count(); ++e)
                        pots.push_back({u(blo, bhi), u(blo, bhi), u(blo, bhi), u(blo, bhi)});
                    std::vector<VertexField> fields;
                    for (int v = 0; v < g.vertex_count(); ++v)
                        fields.push_back({u(flo, fhi), u(flo, fhi)});
                    return SpinSystem(std::move(g), std::move(pots), std::move(fields));
                }
                return make_uniform_ising(std::move(g), ising_j, ising_b);
            }();
            const ValidationReport rep = validate_system(sys);
            if (!rep.ok()) throw ModelFormatError("generated system invalid: " + rep.to_string());
            save_model(sys, output_path);
            std::cout << "wrote " << output_path << " (n=" << sys.vertex_count()
                      << ", edges=" << sys.edge_count() << ")\n";
            return kOk;
        }
    } catch (const ModelFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFileError;
    } catch (const OracleLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCapExceeded;
    } catch (const RegimeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    }
    return kUsage;
}
