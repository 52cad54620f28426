#pragma once

#include "stokes_ev/common.hpp"
#include "stokes_ev/geometry.hpp"
#include "stokes_ev/stokes_kernels.hpp"

#include <optional>

namespace sev {

enum class DiluteVariant { UMinus, UD };

// Superposition of single-sphere disturbances in the linear flow eps x:
//   u^-(x) = eps x + sum_l [u1(x - x^l) - eps x]
// and u^d = u^- - C^d. Written out, u1(x - x^l) - eps x equals the
// disturbance of sphere l minus eps x^l.
struct DiluteField {
    SuspensionConfig cfg;
    StrainRate eps;
    Vec3 c_d = Vec3::Zero();
    DiluteVariant variant = DiluteVariant::UD;
};

// u^- (C^d = 0) or u^d with C^d chosen by choose_cd on the default boundary nodes.
DiluteField make_dilute(const SuspensionConfig& cfg, const StrainRate& eps, DiluteVariant variant);

FieldSample eval_dilute(const DiluteField& df, const Vec3& x);

// Container sphere followed by every particle sphere, each a band-limited
// product rule (used for C^d, boundary sup norms and boundary energies).
std::vector<SphereQuadrature> fluid_boundary_quadrature(const SuspensionConfig& cfg, int band);

// Componentwise (min + max) / 2, the minimizer of the componentwise sup norm
// of mismatch - c over the given samples. Zero for an empty list.
Vec3 chebyshev_center(const std::vector<Vec3>& mismatch);

// Componentwise midpoint of the un-shifted boundary mismatch u^-(x) - target,
// target = eps x^l on particle l and eps x on the container.
Vec3 choose_cd(const DiluteField& df, const std::vector<SphereQuadrature>& boundary_quad);

// Sup over the nodes of |u^d - target| for the C^d stored in df.
double boundary_mismatch_sup(const DiluteField& df, const std::vector<SphereQuadrature>& boundary_quad);

struct EnergyEstimate {
    double value = 0.0;
    double rel_err = 0.0;
};

// 2 eta sum_i w_i e:e over the quadrature nodes.
EnergyEstimate energy(const FieldFn& field, const BallQuadrature& quad, double eta);

// Same integral written as 2 eta (eps:eps |Omega_F| + sum_i w_i (e:e - eps:eps)),
// which removes the quadrature error of the constant part.
EnergyEstimate energy_excess(const FieldFn& field, const BallQuadrature& quad, const SuspensionConfig& cfg,
                             const StrainRate& eps);

// Dissipation of a Stokes flow from its boundary values: int u . sigma n over
// the fluid boundary with n pointing out of the fluid.
double boundary_route_energy(const FieldFn& field, const SuspensionConfig& cfg, int band);

// W = int_{dOmega} sigma n . eps x dS over the container. For the dilute field
// it enters the lower-bound functional J(u^-) = 2 W(u^-) - E(u^-): because
// E(u - u^-) >= 0 and the particles of the true flow are force- and
// torque-free, J(u^-) <= E(u), and J expands as 2 eta |Omega| eps:eps (1 + 5 phi / 2).
double container_work(const FieldFn& field, const SuspensionConfig& cfg, const StrainRate& eps, int band);

// E / (2 |Omega| eps:eps).
double effective_viscosity(double E, const SuspensionConfig& cfg, const StrainRate& eps);

// Dirichlet data of u^E = u^+ - u^d: eps x^l - u^d on particle l, eps x - u^d
// on the container.
struct ErrorBoundaryData {
    std::function<Vec3(const Vec3&)> container;
    std::vector<std::function<Vec3(const Vec3&)>> particles;
};
ErrorBoundaryData error_boundary_data(const DiluteField& df);

struct ViscosityReport {
    double phi = 0.0;          // N a^3 / R^3, the particle share of the container
    double phi_lattice = 0.0;  // (4 pi / 3) a^3
    double eta_hat_dilute = 0.0;  // J(u^d) / (2 |Omega| eps:eps)
    double eta_hat_energy = 0.0;  // E(u^d) / (2 |Omega| eps:eps)
    std::optional<double> eta_hat_plus;
    double einstein = 0.0;  // eta (1 + 5 phi / 2)
    double abs_gap = 0.0;   // |eta_hat_dilute - einstein|
    double rel_gap = 0.0;   // |eta_hat_dilute / eta - 1 - 5 phi / 2| / (5 phi / 2)
    double quadrature_rel_err = 0.0;
    double energy_volume = 0.0;          // E(u^d) from the volume rule
    double energy_boundary_route = 0.0;  // E(u^d) from boundary values
    double container_work = 0.0;         // int_{dOmega} sigma^d n . eps x dS
    Vec3 c_d = Vec3::Zero();
    std::size_t N = 0;
    double R = 0.0;
    double a = 0.0;
};

ViscosityReport dilute_viscosity(const SuspensionConfig& cfg, const StrainRate& eps,
                                 const VolumeRuleOptions& opt = {});

}  // namespace sev
