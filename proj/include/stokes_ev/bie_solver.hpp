#pragma once

#include "stokes_ev/common.hpp"
#include "stokes_ev/geometry.hpp"
#include "stokes_ev/lamb.hpp"
#include "stokes_ev/stokes_kernels.hpp"

#include <optional>
#include <ostream>

namespace sev {

using VelocityFn = std::function<Vec3(const Vec3&)>;

struct BieOptions {
    int particle_band = 11;
    int container_band = 11;
    // Lamb series degree used for field evaluation is band + lamb_extra.
    int lamb_extra = 3;
    double max_condition = 1e14;
    double max_relative_residual = 1e-8;
};

// Boundary condition on one particle surface.
struct ParticleCondition {
    enum class Kind { Rigid, Free, General };
    Kind kind = Kind::Rigid;
    Vec3 v = Vec3::Zero();      // Rigid: translation
    Vec3 omega = Vec3::Zero();  // Rigid: rotation about the centre
    VelocityFn data;            // General: arbitrary velocity

    static ParticleCondition rigid(const Vec3& v, const Vec3& omega = Vec3::Zero());
    static ParticleCondition free();
    static ParticleCondition general(VelocityFn f);
};

struct DirichletProblem {
    VelocityFn container;
    std::vector<ParticleCondition> particles;  // one per cfg centre
};

// Sampled traction t = sigma n on one closed surface, n pointing away from
// the sphere centre. Patch 0 is the container, patch l + 1 is particle l.
struct TractionPatch {
    int id = 0;
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
    double sign = 1.0;  // +1 container, -1 particle
    int band = 0;
    SphereQuadrature quad;
    Eigen::MatrixXd coeffs;  // (band+1)^2 x 3 real harmonic coefficients
    std::vector<Vec3> traction;
    VelocityFn velocity;  // Dirichlet data (rigid motion resolved for free particles)
    bool rigid = false;
    Vec3 v = Vec3::Zero();
    Vec3 omega = Vec3::Zero();

    Vec3 traction_at(const Vec3& x) const;
    // Fluid-facing normal at a boundary point.
    Vec3 fluid_normal(const Vec3& x) const;
};

struct TractionField {
    SuspensionConfig cfg;
    std::vector<TractionPatch> patches;
    std::vector<LambSeries> series;  // signed layer-potential contribution of each patch

    // Velocity, pressure and gradient of the solved flow at a point of the
    // closed fluid region (boundary points give one-sided limits).
    FieldSample evaluate(const Vec3& x) const;
    std::size_t particle_count() const { return patches.size() - 1; }
};

struct SolveReport {
    double relative_residual = 0.0;  // of the projected linear system
    double condition_estimate = 0.0;
    double boundary_velocity_error = 0.0;  // max |u - g| over boundary nodes, relative to max |g|
    int particle_band = 0;
    int container_band = 0;
    long unknowns = 0;
    std::vector<Mat3> stresslets;  // int sigma n (x - x^l)^T dS, n away from the centre
    std::vector<Vec3> forces;
    std::vector<Vec3> torques;
    double force_balance = 0.0;  // |sum of all surface forces|
    double eta_hat_plus = 0.0;
    double energy_boundary = 0.0;
    std::optional<double> energy_volume;
    std::optional<double> energy_volume_error;
};

struct SolveResult {
    TractionField field;
    SolveReport report;
};

SolveResult solve_dirichlet(const SuspensionConfig& cfg, const DirichletProblem& problem,
                            const BieOptions& opt = {});
// u = eps x^l on each particle, u = eps x on the container.
SolveResult solve_pinned(const SuspensionConfig& cfg, const StrainRate& eps, const BieOptions& opt = {});
// Force- and torque-free particles, u = eps x on the container.
SolveResult solve_full(const SuspensionConfig& cfg, const StrainRate& eps, const BieOptions& opt = {});

// eta + sum_l eps : S^l / (2 |Omega| eps:eps).
double eta_hat_plus(const TractionField& tf, const StrainRate& eps);
// int u . sigma n over the fluid boundary with n out of the fluid.
double boundary_energy(const TractionField& tf);
// Volume route 2 eta int e:e, integrating e:e - eps:eps against the rule and
// adding eps:eps |Omega_F| exactly.
double volume_energy(const TractionField& tf, const StrainRate& eps, const VolumeRule& rule);

// Dumps patch id, node, weight, t1, t2, t3 as CSV.
void write_traction_csv(std::ostream& os, const TractionField& tf);

}  // namespace sev
