#include "stokes_ev/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <type_traits>

namespace sev {

using nlohmann::json;

namespace {

template <class T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config is missing \"") + key + "\"");
    const json& v = j.at(key);
    // nlohmann converts 7.5 to an integer silently; integers must be written as integers.
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(std::string("config field \"") + key + "\" must be an integer");
    }
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
    }
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    c.R = required<double>(j, "R");
    c.a = required<double>(j, "a");
    c.eta = required<double>(j, "eta");
    const auto q = required<long long>(j, "quad_order");
    const auto s = required<long long>(j, "seed");
    if (!(c.R > 0.0) || !(c.a > 0.0) || !(c.eta > 0.0)) throw ConfigError("R, a and eta must be positive");
    if (!(2.0 * c.a < 1.0)) throw ConfigError("a must be below 1/2 so that spheres do not overlap");
    if (q < 3 || q > 60) throw ConfigError("quad_order must lie in [3, 60]");
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.quad_order = static_cast<int>(q);
    c.seed = static_cast<std::uint64_t>(s);
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_run_config(j);
}

json to_json(const RunConfig& c) {
    return {{"R", c.R}, {"a", c.a}, {"eta", c.eta}, {"quad_order", c.quad_order}, {"seed", c.seed}};
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json to_json(const Mat3& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    return rows;
}

json to_json(const ViscosityReport& r) {
    json j = {
        {"N", r.N},
        {"R", r.R},
        {"a", r.a},
        {"phi", r.phi},
        {"phi_lattice", r.phi_lattice},
        {"eta_hat_dilute", r.eta_hat_dilute},
        {"eta_hat_energy", r.eta_hat_energy},
        {"einstein", r.einstein},
        {"abs_gap", r.abs_gap},
        {"rel_gap", r.rel_gap},
        {"quadrature_rel_err", r.quadrature_rel_err},
        {"energy_volume", r.energy_volume},
        {"energy_boundary_route", r.energy_boundary_route},
        {"container_work", r.container_work},
        {"c_d", to_json(r.c_d)},
    };
    j["eta_hat_plus"] = r.eta_hat_plus ? json(*r.eta_hat_plus) : json(nullptr);
    return j;
}

json to_json(const SolveReport& r) {
    json j = {
        {"relative_residual", r.relative_residual},
        {"condition_estimate", r.condition_estimate},
        {"boundary_velocity_error", r.boundary_velocity_error},
        {"particle_band", r.particle_band},
        {"container_band", r.container_band},
        {"unknowns", r.unknowns},
        {"force_balance", r.force_balance},
        {"eta_hat_plus", r.eta_hat_plus},
        {"energy_boundary", r.energy_boundary},
    };
    json S = json::array(), F = json::array(), T = json::array();
    for (const auto& s : r.stresslets) S.push_back(to_json(s));
    for (const auto& f : r.forces) F.push_back(to_json(f));
    for (const auto& t : r.torques) T.push_back(to_json(t));
    j["stresslets"] = S;
    j["forces"] = F;
    j["torques"] = T;
    j["energy_volume"] = r.energy_volume ? json(*r.energy_volume) : json(nullptr);
    j["energy_volume_error"] = r.energy_volume_error ? json(*r.energy_volume_error) : json(nullptr);
    return j;
}

json to_json(const ConstantLedger& L) {
    return {
        {"a", L.a},         {"d", L.d},
        {"R", L.R},         {"delta", {L.delta[0], L.delta[1], L.delta[2], L.delta[3]}},
        {"C1", L.C1},       {"C2", L.C2},
        {"C3", L.C3},       {"C4", L.C4},
        {"C5", L.C5},       {"C6", L.C6},
        {"beta", L.beta},   {"x", L.x},
        {"k_wall", L.k_wall}, {"k_sphere", L.k_sphere},
        {"k_tangent", L.k_tangent},
    };
}

json to_json(const AuditResult& r) {
    return {{"inequality_id", r.id}, {"field_id", r.field_id}, {"lhs", r.lhs},   {"rhs", r.rhs},
            {"margin", r.margin},    {"pass", r.pass},         {"tol", r.tol}};
}

json to_json(const BoundaryNorms& n) {
    json j = {
        {"band", n.band},
        {"pressure_shift", n.pressure_shift},
        {"t", n.t},
        {"p", n.p},
        {"u", n.u},
        {"u_spheres", n.u_spheres},
        {"u_container", n.u_container},
        {"dudn", n.dudn},
        {"dudn_identity", n.dudn_identity},
        {"dtau", {n.dtau[0], n.dtau[1]}},
        {"dtau_spectral", {n.dtau_spectral[0], n.dtau_spectral[1]}},
        {"incompressibility_lhs", n.incompressibility_lhs},
        {"incompressibility_rhs", n.incompressibility_rhs},
        {"traction_mismatch", n.traction_mismatch},
        {"pressure_mismatch", n.pressure_mismatch},
    };
    j["p_volume"] = n.has_volume ? json(n.p_volume) : json(nullptr);
    j["strain_volume"] = n.has_volume ? json(n.strain_volume) : json(nullptr);
    return j;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "a,R,N,method,phi,phi_lattice,eta_hat,einstein,gap,rel_gap\n";
    for (const auto& r : rows)
        write_csv_row(os, {fmt17(r.a), fmt17(r.R), std::to_string(r.N), r.method, fmt17(r.phi), fmt17(r.phi_lattice),
                           fmt17(r.eta_hat), fmt17(r.einstein), fmt17(r.gap), fmt17(r.rel_gap)});
}

double fit_gap_exponent(const std::vector<SweepRow>& rows) {
    std::vector<double> x, y;
    for (const auto& r : rows)
        if (r.phi > 0.0 && r.gap != 0.0) {
            x.push_back(std::log(r.phi));
            y.push_back(std::log(std::abs(r.gap)));
        }
    if (x.size() < 2) throw DomainError("exponent fit needs at least two rows with a nonzero gap");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw DomainError("exponent fit needs distinct volume fractions");
    return sxy / sxx;
}

void write_lattice_csv(std::ostream& os, const std::vector<LatticeSumResult>& rows) {
    os << "x1,x2,x3,power,rho,value,bound,margin\n";
    for (const auto& r : rows) {
        const double bound = lattice_bound(r.power);
        write_csv_row(os, {fmt17(r.x[0]), fmt17(r.x[1]), fmt17(r.x[2]), std::to_string(r.power),
                           std::isfinite(r.rho) ? fmt17(r.rho) : "inf", fmt17(r.value), fmt17(bound),
                           fmt17(bound - std::abs(r.value))});
    }
}

}  // namespace sev
