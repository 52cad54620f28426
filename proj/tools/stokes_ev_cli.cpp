// Command-line front end. Exit codes:
//   0 success
//   1 unexpected internal error
//   2 configuration or input-domain error (bad JSON, invalid geometry, bad flags)
//   3 numerical non-convergence (ill-conditioned solve, quadrature budget, unconverged sums)

#include "stokes_ev/bie_solver.hpp"
#include "stokes_ev/dilute_field.hpp"
#include "stokes_ev/harmonic_analysis.hpp"
#include "stokes_ev/inequality_audit.hpp"
#include "stokes_ev/lattice_sums.hpp"
#include "stokes_ev/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

using namespace sev;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kConvergence = 3 };

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format;
};

// splitmix64 step keyed by a module tag, so every module draws from its own stream.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ConfigError("cannot open output file " + path);
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse list entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::vector<std::string> parse_words(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

RunConfig run_config(const Globals& g) {
    if (g.config_path.empty()) throw ConfigError("--config is required for this subcommand");
    RunConfig c = load_run_config(g.config_path);
    if (g.seed) c.seed = *g.seed;
    return c;
}

// A container too small for any lattice point is run as a particle-free
// configuration, so that N = 0 reproduces the homogeneous flow.
SuspensionConfig suspension(double R, double a, double eta, bool cross) {
    if (cross) return config_from_centers(R, a, eta, nearest_neighbour_cross());
    try {
        return build_config(R, a, eta);
    } catch (const EmptyError&) {
        return config_from_centers(R, a, eta, {});
    }
}

StrainRate strain_from(const std::string& s) {
    const auto e = parse_list(s);
    if (e.size() != 3) throw ConfigError("--strain takes three diagonal entries");
    return make_strain(Eigen::Vector3d(e[0], e[1], e[2]).asDiagonal());
}

BieOptions bie_options(int band) {
    BieOptions o;
    o.particle_band = band;
    o.container_band = band;
    return o;
}

// ---------------------------------------------------------------- ev / sweep

struct EvOptions {
    std::string methods = "dilute";
    std::string strain = "1,-0.5,-0.5";
    std::string a_list;
    std::string R_list;
    bool fit = false;
    bool cross = false;
};

struct EvRun {
    std::vector<SweepRow> rows;
    json reports = json::array();
};

void run_one(const RunConfig& rc, double R, double a, const EvOptions& o, EvRun& run) {
    const SuspensionConfig cfg = suspension(R, a, rc.eta, o.cross);
    const StrainRate eps = strain_from(o.strain);
    json entry = {{"R", R}, {"a", a}, {"N", cfg.N()}};
    auto add_row = [&](const std::string& method, double eta_hat) {
        SweepRow row;
        row.a = a;
        row.R = R;
        row.N = cfg.N();
        row.method = method;
        row.phi = container_fraction(cfg);
        row.phi_lattice = volume_fraction(cfg);
        row.eta_hat = eta_hat;
        row.einstein = rc.eta * (1.0 + 2.5 * row.phi);
        row.gap = std::abs(eta_hat - row.einstein);
        row.rel_gap = row.phi > 0.0 ? row.gap / (2.5 * row.phi * rc.eta) : 0.0;
        run.rows.push_back(row);
    };
    for (const auto& m : parse_words(o.methods)) {
        if (m == "dilute") {
            const ViscosityReport r = dilute_viscosity(cfg, eps);
            entry["dilute"] = to_json(r);
            add_row("dilute", r.eta_hat_dilute);
        } else if (m == "pinned" || m == "full") {
            const SolveResult s = m == "pinned" ? solve_pinned(cfg, eps, bie_options(rc.quad_order))
                                                : solve_full(cfg, eps, bie_options(rc.quad_order));
            json j = to_json(s.report);
            j["eta_hat_energy_route"] = effective_viscosity(s.report.energy_boundary, cfg, eps);
            entry[m] = j;
            add_row(m, s.report.eta_hat_plus);
        } else {
            throw ConfigError("unknown method '" + m + "' (expected dilute, pinned or full)");
        }
    }
    run.reports.push_back(entry);
}

int cmd_ev(const Globals& g, const EvOptions& o, bool sweep) {
    const RunConfig rc = run_config(g);
    const std::vector<double> as = o.a_list.empty() ? std::vector<double>{rc.a} : parse_list(o.a_list);
    const std::vector<double> Rs = o.R_list.empty() ? std::vector<double>{rc.R} : parse_list(o.R_list);
    if (sweep && o.a_list.empty() && o.R_list.empty()) throw ConfigError("sweep needs --a-list and/or --R-list");
    EvRun run;
    for (double R : Rs)
        for (double a : as) run_one(rc, R, a, o, run);
    std::optional<double> slope;
    if (o.fit) {
        std::vector<SweepRow> fit_rows;
        const std::string method = parse_words(o.methods).front();
        for (const auto& r : run.rows)
            if (r.method == method) fit_rows.push_back(r);
        slope = fit_gap_exponent(fit_rows);
    }
    Output out(g.out_path);
    const std::string fmt = g.format.empty() ? (sweep ? "csv" : "json") : g.format;
    if (fmt == "csv") {
        write_sweep_csv(out.os(), run.rows);
        if (slope) out.os() << "# gap_exponent," << fmt17(*slope) << '\n';
    } else {
        json j = {{"config", to_json(rc)}, {"runs", run.reports}};
        if (slope) j["gap_exponent"] = *slope;
        out.os() << j.dump(2) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- audit

struct AuditOptions {
    std::string methods = "pinned";
    std::string strain = "1,-0.5,-0.5";
    bool cross = false;
    bool volume = true;
    int norm_band = 24;
    std::size_t extension_samples = 100000;
};

int cmd_audit(const Globals& g, const AuditOptions& o) {
    const RunConfig rc = run_config(g);
    const SuspensionConfig cfg = suspension(rc.R, rc.a, rc.eta, o.cross);
    const StrainRate eps = strain_from(o.strain);
    const ConstantLedger L = ledger(cfg.a, cfg.d, cfg.R);
    std::vector<AuditResult> all;
    json fields = json::array();
    std::optional<VolumeRule> rule;
    if (o.volume) rule = fluid_volume_rule(cfg);
    for (const auto& m : parse_words(o.methods)) {
        if (m != "pinned" && m != "full") throw ConfigError("audit methods are pinned and full");
        const SolveResult s = m == "pinned" ? solve_pinned(cfg, eps, bie_options(rc.quad_order))
                                            : solve_full(cfg, eps, bie_options(rc.quad_order));
        const BoundaryNorms n = boundary_norms(s.field, o.norm_band, rule ? &*rule : nullptr);
        const auto res = audit(n, L, cfg, m);
        all.insert(all.end(), res.begin(), res.end());
        fields.push_back({{"field_id", m}, {"norms", to_json(n)}, {"solve", to_json(s.report)}});
    }
    const auto ext = normal_extension_check(cfg, o.extension_samples, sub_seed(rc.seed, 2));
    all.insert(all.end(), ext.begin(), ext.end());
    Output out(g.out_path);
    if (g.format == "json") {
        json results = json::array();
        for (const auto& r : all) results.push_back(to_json(r));
        json j = {{"config", to_json(rc)}, {"ledger", to_json(L)}, {"fields", fields}, {"results", results}};
        out.os() << j.dump(2) << '\n';
    } else {
        write_audit_csv(out.os(), all);
    }
    return kOk;
}

// ---------------------------------------------------------------- sums

struct SumsOptions {
    std::string powers = "2";
    std::string rho = "50";
    std::size_t samples = 1000;
    double radius = std::sqrt(3.0) / 2.0;
    double tol = 1e-6;
    int max_shells = 64;
};

int cmd_sums(const Globals& g, const SumsOptions& o) {
    std::uint64_t seed = 7;
    if (!g.config_path.empty()) seed = load_run_config(g.config_path).seed;
    if (g.seed) seed = *g.seed;
    const double rho = (o.rho == "inf" || o.rho == "infinity") ? kInf : parse_list(o.rho).at(0);
    const auto points = ball_samples(o.samples, o.radius, sub_seed(seed, 1));
    std::vector<LatticeSumResult> rows;
    bool converged = true;
    for (double pw : parse_list(o.powers)) {
        const int p = static_cast<int>(pw);
        if (p != 2 && p != 3) throw ConfigError("--power must be 2 or 3");
        std::vector<LatticeSumResult> part(points.size());
        parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) part[i] = regularized_sum(points[i], p, rho, o.tol, o.max_shells);
        });
        for (const auto& r : part) converged = converged && r.converged;
        rows.insert(rows.end(), part.begin(), part.end());
    }
    Output out(g.out_path);
    if (g.format == "json") {
        json arr = json::array();
        std::size_t violations = 0;
        for (const auto& r : rows) {
            const double bound = lattice_bound(r.power);
            violations += std::abs(r.value) > bound;
            arr.push_back({{"x", to_json(r.x)},
                           {"power", r.power},
                           {"rho", std::isfinite(r.rho) ? json(r.rho) : json("inf")},
                           {"value", r.value},
                           {"bound", bound},
                           {"margin", bound - std::abs(r.value)},
                           {"shells", r.shells},
                           {"converged", r.converged}});
        }
        out.os() << json({{"seed", seed}, {"violations", violations}, {"rows", arr}}).dump(2) << '\n';
    } else {
        write_lattice_csv(out.os(), rows);
    }
    if (!converged) {
        std::cerr << "warning: some infinite-range sums did not reach the tolerance\n";
        return kConvergence;
    }
    return kOk;
}

// ---------------------------------------------------------------- pinorm

int cmd_pinorm(const Globals& g, const std::string& orders, double radius) {
    Output out(g.out_path);
    std::vector<std::pair<int, double>> rows;
    for (double o : parse_list(orders)) rows.emplace_back(static_cast<int>(o), pi_norm_estimate(radius, static_cast<int>(o)));
    if (g.format == "json") {
        json arr = json::array();
        for (const auto& [o, e] : rows) arr.push_back({{"order", o}, {"estimate", e}});
        out.os() << json({{"radius", radius}, {"estimates", arr}}).dump(2) << '\n';
    } else {
        out.os() << "order,estimate\n";
        for (const auto& [o, e] : rows) write_csv_row(out.os(), {std::to_string(o), fmt17(e)});
    }
    return kOk;
}

// ---------------------------------------------------------------- constants

int cmd_constants(const Globals& g, std::optional<double> a, std::optional<double> R, double d) {
    if ((!a || !R) && !g.config_path.empty()) {
        const RunConfig rc = load_run_config(g.config_path);
        if (!a) a = rc.a;
        if (!R) R = rc.R;
    }
    if (!a || !R) throw ConfigError("constants needs --a and --R or a config file");
    const ConstantLedger L = ledger(*a, d, *R);
    Output out(g.out_path);
    if (g.format == "csv") {
        out.os() << "name,value\n";
        const json j = to_json(L);
        for (const auto& [k, v] : j.items()) {
            if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i)
                    write_csv_row(out.os(), {k + std::to_string(i + 1), fmt17(v[i].get<double>())});
            } else {
                write_csv_row(out.os(), {k, fmt17(v.get<double>())});
            }
        }
    } else {
        out.os() << to_json(L).dump(2) << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective viscosity of dilute rigid-sphere suspensions"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "JSON config {R, a, eta, quad_order, seed}");
    app.add_option("--seed", g.seed, "Override the config seed");
    app.add_option("--out", g.out_path, "Write output to this file instead of stdout");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    EvOptions ev;
    auto add_ev_flags = [](CLI::App* c, EvOptions& o) {
        c->add_option("--methods", o.methods, "Comma list of dilute, pinned, full");
        c->add_option("--strain", o.strain, "Diagonal of the traceless strain rate");
        c->add_option("--a-list", o.a_list, "Comma list of particle radii");
        c->add_option("--R-list", o.R_list, "Comma list of container radii");
        c->add_flag("--fit", o.fit, "Append the least-squares slope of log|gap| against log phi");
        c->add_flag("--cross", o.cross, "Use the seven-sphere nearest-neighbour cross instead of the lattice rule");
    };
    auto* ev_cmd = app.add_subcommand("ev", "Effective viscosity for one configuration (or an a-list)");
    add_ev_flags(ev_cmd, ev);
    EvOptions sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Effective viscosity over an (a, R) grid, CSV by default");
    add_ev_flags(sweep_cmd, sw);

    AuditOptions au;
    auto* audit_cmd = app.add_subcommand("audit", "Inequality audit on solved fields");
    audit_cmd->add_option("--methods", au.methods, "Comma list of pinned, full");
    audit_cmd->add_option("--strain", au.strain, "Diagonal of the traceless strain rate");
    audit_cmd->add_flag("--cross", au.cross, "Use the nearest-neighbour cross");
    audit_cmd->add_flag("!--no-volume", au.volume, "Skip volume norms (drops the volume pressure inequalities)");
    audit_cmd->add_option("--norm-band", au.norm_band, "Band of the boundary norm quadrature");
    audit_cmd->add_option("--extension-samples", au.extension_samples, "Samples for the normal extension check");

    SumsOptions su;
    auto* sums_cmd = app.add_subcommand("sums", "Regularized lattice sums at seeded sample points");
    sums_cmd->add_option("--power", su.powers, "2, 3 or a comma list");
    sums_cmd->add_option("--rho", su.rho, "Cutoff radius or inf");
    sums_cmd->add_option("--samples", su.samples, "Number of sample points");
    sums_cmd->add_option("--radius", su.radius, "Sampling ball radius");
    sums_cmd->add_option("--tol", su.tol, "Stopping tolerance for rho = inf");
    sums_cmd->add_option("--max-shells", su.max_shells, "Shell limit for rho = inf");

    std::string orders = "8,12,16";
    double pi_radius = 1.0;
    auto* pi_cmd = app.add_subcommand("pinorm", "Discretized norm of the principal-value pressure operator");
    pi_cmd->add_option("--orders", orders, "Comma list of bands");
    pi_cmd->add_option("--radius", pi_radius, "Sphere radius");

    std::optional<double> ca, cR;
    double cd = 1.0;
    auto* const_cmd = app.add_subcommand("constants", "Explicit constants of the traction estimate");
    const_cmd->add_option("--a", ca, "Particle radius");
    const_cmd->add_option("--R", cR, "Container radius");
    const_cmd->add_option("--d", cd, "Lattice spacing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*ev_cmd) return cmd_ev(g, ev, false);
        if (*sweep_cmd) return cmd_ev(g, sw, true);
        if (*audit_cmd) return cmd_audit(g, au);
        if (*sums_cmd) return cmd_sums(g, su);
        if (*pi_cmd) return cmd_pinorm(g, orders, pi_radius);
        if (*const_cmd) return cmd_constants(g, ca, cR, cd);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << '\n';
        return kConvergence;
    } catch (const BudgetError& e) {
        std::cerr << "non-convergence: " << e.what() << '\n';
        return kConvergence;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
