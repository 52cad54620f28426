#pragma once

#include "stokes_ev/common.hpp"
#include "stokes_ev/geometry.hpp"

#include <array>
#include <utility>

namespace sev {

// Velocity, pressure and derived tensors at a point. grad(i, j) = du_i/dx_j.
struct FieldSample {
    Vec3 u = Vec3::Zero();
    double p = 0.0;
    Mat3 grad = Mat3::Zero();
    Mat3 e = Mat3::Zero();
    Mat3 sigma = Mat3::Zero();
};

FieldSample make_sample(const Vec3& u, double p, const Mat3& grad, double eta);

// Free-space Stokes kernels at separation x: Oseen tensor G, pressure vector
// P and stress tensor Sig with Sig[i](j, k) = Sig_ijk.
struct KernelEval {
    Mat3 G = Mat3::Zero();
    Vec3 P = Vec3::Zero();
    std::array<Mat3, 3> Sig{};
};

KernelEval oseen(const Vec3& x, double eta);

// Derivative dG_ij/dx_k of the Oseen tensor, returned as dG[k](i, j).
std::array<Mat3, 3> oseen_gradient(const Vec3& x, double eta);

// Pressure of the stress-kernel (double-layer) field generated by the
// dipole tensor A: (eta / 2 pi) (tr A / r^3 - 3 x.A.x / r^5).
double stresslet_pressure(const Vec3& x, const Mat3& A, double eta);

struct SingleSphereField {
    FieldSample disturbance;
    FieldSample total;
};

// Exact field of a rigid sphere of radius a held at the origin in the linear
// flow eps x. x is measured from the sphere centre.
SingleSphereField single_sphere_field(const Vec3& x, double a, const StrainRate& eps, double eta);

// Disturbance part only (no domain check), used inside superpositions.
FieldSample sphere_disturbance(const Vec3& x, double a, const Mat3& eps, double eta);

FieldSample linear_flow(const Vec3& x, const Mat3& eps, double eta);

using FieldFn = std::function<FieldSample(const Vec3&)>;

// (|eta lap u - grad p|, |div u|) by fourth-order centred differences of field_fn (stencil x +- 2h).
std::pair<double, double> stokes_residual(const FieldFn& field_fn, const Vec3& x, double h, double eta);

// |div sigma| by the same fourth-order stencil.
double stress_divergence_residual(const FieldFn& field_fn, const Vec3& x, double h);

}  // namespace sev
