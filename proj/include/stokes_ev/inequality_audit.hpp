#pragma once

#include "stokes_ev/bie_solver.hpp"
#include "stokes_ev/common.hpp"
#include "stokes_ev/geometry.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <string>

namespace sev {

// Explicit constants of the boundary traction estimate for spheres of radius
// a on a lattice of spacing d inside a container of radius R.
struct ConstantLedger {
    double a = 0.0, d = 1.0, R = 0.0;
    std::array<double, 4> delta{};
    double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0, C5 = 0.0;
    double beta = 0.0;
    // x = C1^-1 (C3 + (1 + sqrt2) C5 beta), C6 = (1 + x) / (1 - x).
    double x = 0.0;
    double C6 = 0.0;
    // Traction coefficients, each multiplying eta.
    double k_wall = 0.0;     // (10/7)(6/R + 3 C4 / (2 sqrt2))
    double k_sphere = 0.0;   // 60 / (7a)
    double k_tangent = 0.0;  // (10/7)(3/4 + 25 sqrt2)
};

double beta_constant(double a, double d, double R);
// C1..C5 for arbitrary positive deltas.
std::array<double, 5> constants_for(const std::array<double, 4>& delta, double a, double d);
// Throws DomainError unless 0 < 2a < d < R.
ConstantLedger ledger(double a, double d, double R);

// Norms entering the estimates, all L2 over the fluid boundary unless noted.
// The pressure is normalized by the constant C that zeroes its boundary mean
// (minimizing ||p + C|| on the boundary); t is shifted consistently.
struct BoundaryNorms {
    int band = 0;
    double pressure_shift = 0.0;
    double t = 0.0;
    double p = 0.0;
    double u = 0.0;
    double u_spheres = 0.0;
    double u_container = 0.0;
    double dudn = 0.0;           // from the field gradient
    double dudn_identity = 0.0;  // from traction and tangential data derivatives
    std::array<double, 2> dtau{};           // finite differences of the boundary data
    std::array<double, 2> dtau_spectral{};  // from the field gradient
    double incompressibility_lhs = 0.0;     // int |du/dn . n|^2
    double incompressibility_rhs = 0.0;     // 2 sum_i int |du/dtau_i . tau_i|^2
    double traction_mismatch = 0.0;  // ||t - sigma n|| / ||t||, supplied traction vs field stress
    double pressure_mismatch = 0.0;  // ||p - (2 eta D' - n.t)|| / ||p||, same normalization
    bool has_volume = false;
    double p_volume = 0.0;        // ||p + C|| over the fluid region
    double strain_volume = 0.0;   // int e:e over the fluid region

    double dtau_sum() const { return dtau[0] + dtau[1]; }
};

// Access to a flow for boundary_norms: one-sided field evaluation, Dirichlet
// data per patch (0 container, l + 1 particle l) and, optionally, the
// traction sigma n with n pointing away from the patch centre.
struct FlowAccess {
    SuspensionConfig cfg;
    FieldFn field;
    std::function<Vec3(int, const Vec3&)> data;
    std::function<Vec3(int, const Vec3&)> traction;
};

FlowAccess flow_access(const TractionField& tf);

BoundaryNorms boundary_norms(const FlowAccess& flow, int band, const VolumeRule* rule = nullptr);
BoundaryNorms boundary_norms(const TractionField& tf, int band, const VolumeRule* rule = nullptr);

struct AuditResult {
    std::string id;
    std::string field_id;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
    double tol = 0.0;
};

AuditResult make_audit(const std::string& id, const std::string& field_id, double lhs, double rhs, double tol);

// Default relative tolerance of the audit, covering quadrature and solver error.
inline constexpr double kAuditTolerance = 1e-6;

// One result per inequality: t_estimate, dudn_estimate, p_inequality,
// p_bdy_estimate, final_estimate_traction, incompressibility. The volume
// pressure inequalities need norms computed with a volume rule.
std::vector<AuditResult> audit(const BoundaryNorms& norms, const ConstantLedger& led, const SuspensionConfig& cfg,
                               const std::string& field_id, double tol = kAuditTolerance);

// Radial extension of the fluid normal: linear along rays from the fluid
// boundary value to zero across a < |x - x^l| < d/2 and R - d/2 < |x| < R.
struct NormalExtension {
    Vec3 value = Vec3::Zero();
    Mat3 grad = Mat3::Zero();
    double div = 0.0;
};
NormalExtension normal_extension(const SuspensionConfig& cfg, const Vec3& x);

// Dense seeded sampling of the shells: boundary values, |N| <= 1,
// |grad N| <= 1/(d/2 - a) (spectral norm) and div N >= 0.
std::vector<AuditResult> normal_extension_check(const SuspensionConfig& cfg, std::size_t samples = 100000,
                                                std::uint64_t seed = 7);

void write_audit_csv(std::ostream& os, const std::vector<AuditResult>& results);

}  // namespace sev
