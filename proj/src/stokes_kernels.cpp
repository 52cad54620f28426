#include "stokes_ev/stokes_kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sev {

namespace {
constexpr double kPi = std::numbers::pi;
}

FieldSample make_sample(const Vec3& u, double p, const Mat3& grad, double eta) {
    FieldSample s;
    s.u = u;
    s.p = p;
    s.grad = grad;
    s.e = 0.5 * (grad + grad.transpose());
    s.sigma = -p * Mat3::Identity() + 2.0 * eta * s.e;
    return s;
}

KernelEval oseen(const Vec3& x, double eta) {
    const double r = x.norm();
    if (r == 0.0) throw SingularityError("Stokes kernels are singular at x = 0");
    const double r3 = r * r * r;
    KernelEval k;
    k.G = (Mat3::Identity() / r + x * x.transpose() / r3) / (8.0 * kPi * eta);
    k.P = x / (4.0 * kPi * r3);
    const auto dG = oseen_gradient(x, eta);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l)
                k.Sig[i](j, l) = -(i == l ? k.P(j) : 0.0) + eta * (dG[l](i, j) + dG[i](l, j));
    return k;
}

std::array<Mat3, 3> oseen_gradient(const Vec3& x, double eta) {
    const double r = x.norm();
    if (r == 0.0) throw SingularityError("Stokes kernels are singular at x = 0");
    const double r3 = r * r * r, r5 = r3 * r * r;
    const double c = 1.0 / (8.0 * kPi * eta);
    std::array<Mat3, 3> dG;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = -(i == j ? x(k) : 0.0) / r3;
                v += ((i == k ? x(j) : 0.0) + (j == k ? x(i) : 0.0)) / r3;
                v -= 3.0 * x(i) * x(j) * x(k) / r5;
                dG[k](i, j) = c * v;
            }
    return dG;
}

double stresslet_pressure(const Vec3& x, const Mat3& A, double eta) {
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    const double r3 = r2 * r;
    return eta / (2.0 * kPi) * (A.trace() / r3 - 3.0 * x.dot(A * x) / (r3 * r2));
}

FieldSample sphere_disturbance(const Vec3& x, double a, const Mat3& eps, double eta) {
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    const double a3 = a * a * a, a5 = a3 * a * a;
    const double r5 = r2 * r2 * r, r7 = r5 * r2;
    const Vec3 ex = eps * x;
    const double s = x.dot(ex);
    const double A = a5 / r5;
    const double B = 2.5 * (a3 / r5 - a5 / r7);
    // Radial derivatives divided by r.
    const double dA = -5.0 * a5 / (r5 * r2);
    const double dB = 2.5 * (-5.0 * a3 / r7 + 7.0 * a5 / (r7 * r2));
    const Vec3 u = -A * ex - s * B * x;
    Mat3 grad = -A * eps - dA * ex * x.transpose() - s * B * Mat3::Identity() - 2.0 * B * x * ex.transpose() -
                s * dB * x * x.transpose();
    const double p = -5.0 * a3 * eta * s / r5;
    return make_sample(u, p, grad, eta);
}

SingleSphereField single_sphere_field(const Vec3& x, double a, const StrainRate& eps, double eta) {
    // A few ulps of slack so that a * (unit vector) counts as a surface point.
    if (x.norm() < a * (1.0 - 8.0 * std::numeric_limits<double>::epsilon()))
        throw DomainError("point lies inside the sphere");
    SingleSphereField f;
    f.disturbance = sphere_disturbance(x, a, eps.eps, eta);
    f.total = make_sample(eps.eps * x + f.disturbance.u, f.disturbance.p, eps.eps + f.disturbance.grad, eta);
    return f;
}

FieldSample linear_flow(const Vec3& x, const Mat3& eps, double eta) { return make_sample(eps * x, 0.0, eps, eta); }

// Fourth-order centred stencils: first derivative (-f2 + 8f1 - 8f-1 + f-2)/(12h),
// second derivative (-f2 + 16f1 - 30f0 + 16f-1 - f-2)/(12h^2).
std::pair<double, double> stokes_residual(const FieldFn& field_fn, const Vec3& x, double h, double eta) {
    const FieldSample c = field_fn(x);
    Vec3 lap = -90.0 * c.u;
    Vec3 gp = Vec3::Zero();
    double div = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Vec3 e = h * Vec3::Unit(k);
        const FieldSample p1 = field_fn(x + e), m1 = field_fn(x - e);
        const FieldSample p2 = field_fn(x + 2.0 * e), m2 = field_fn(x - 2.0 * e);
        lap += 16.0 * (p1.u + m1.u) - (p2.u + m2.u);
        gp(k) = (8.0 * (p1.p - m1.p) - (p2.p - m2.p)) / (12.0 * h);
        div += (8.0 * (p1.u(k) - m1.u(k)) - (p2.u(k) - m2.u(k))) / (12.0 * h);
    }
    lap /= 12.0 * h * h;
    return {(eta * lap - gp).norm(), std::abs(div)};
}

double stress_divergence_residual(const FieldFn& field_fn, const Vec3& x, double h) {
    Vec3 div = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
        const Vec3 e = h * Vec3::Unit(k);
        const Mat3 p1 = field_fn(x + e).sigma, m1 = field_fn(x - e).sigma;
        const Mat3 p2 = field_fn(x + 2.0 * e).sigma, m2 = field_fn(x - 2.0 * e).sigma;
        div += (8.0 * (p1.col(k) - m1.col(k)) - (p2.col(k) - m2.col(k))) / (12.0 * h);
    }
    return div.norm();
}

}  // namespace sev
