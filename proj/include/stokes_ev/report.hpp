#pragma once

#include "stokes_ev/bie_solver.hpp"
#include "stokes_ev/dilute_field.hpp"
#include "stokes_ev/inequality_audit.hpp"
#include "stokes_ev/lattice_sums.hpp"

#include <json.hpp>

#include <cstdint>
#include <ostream>
#include <string>

namespace sev {

// Run configuration as read from a JSON file. quad_order is the spherical
// harmonic band used for boundary discretization and surface quadrature.
struct RunConfig {
    double R = 0.0;
    double a = 0.0;
    double eta = 1.0;
    int quad_order = 11;
    std::uint64_t seed = 7;
};

// Throws ConfigError on missing fields, wrong types or invalid values.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

// Shortest decimal form is not used: every float is printed with 17
// significant digits so that CSV output round-trips and compares bytewise.
std::string fmt17(double v);

nlohmann::json to_json(const ViscosityReport& r);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const ConstantLedger& L);
nlohmann::json to_json(const AuditResult& r);
nlohmann::json to_json(const BoundaryNorms& n);
nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const Mat3& m);

// CSV helpers: one header line, then rows of fmt17 values.
void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);

// Sweep row: a, R, N, method, phi, phi_lattice, eta_hat, einstein, gap, rel_gap.
struct SweepRow {
    double a = 0.0;
    double R = 0.0;
    std::size_t N = 0;
    std::string method;
    double phi = 0.0;
    double phi_lattice = 0.0;
    double eta_hat = 0.0;
    double einstein = 0.0;
    double gap = 0.0;
    double rel_gap = 0.0;
};
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Least-squares slope of log|gap| against log phi over rows with nonzero gap.
// Throws DomainError with fewer than two usable rows.
double fit_gap_exponent(const std::vector<SweepRow>& rows);

// Lattice-sum audit rows: x1, x2, x3, power, rho, value, bound, margin, with
// margin = bound - |value|.
void write_lattice_csv(std::ostream& os, const std::vector<LatticeSumResult>& rows);

}  // namespace sev
