#include "stokes_ev/stokes_kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sev;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_direction(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    Vec3 v(n(g), n(g), n(g));
    return v.normalized();
}

// Second-order centred difference of the Oseen tensor along axis k.
Mat3 fd_oseen(const Vec3& x, int k, double eta, double h) {
    const Vec3 e = h * Vec3::Unit(k);
    return (oseen(x + e, eta).G - oseen(x - e, eta).G) / (2.0 * h);
}

}  // namespace

TEST_CASE("Oseen tensor closed forms") {
    const KernelEval k = oseen(Vec3(1, 0, 0), 1.0);
    const Mat3 expected = Vec3(2, 1, 1).asDiagonal().toDenseMatrix() / (8.0 * kPi);
    CHECK((k.G - expected).norm() < 1e-16);
    CHECK((k.P - Vec3(1.0 / (4.0 * kPi), 0, 0)).norm() < 1e-16);
    CHECK_THROWS_AS(oseen(Vec3::Zero(), 1.0), SingularityError);
}

TEST_CASE("kernel symmetry and homogeneity under random scaling") {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> U(0.2, 5.0);
    for (int t = 0; t < 50; ++t) {
        const Vec3 x = U(g) * random_direction(g);
        const double s = U(g);
        const KernelEval a = oseen(x, 1.3), b = oseen(s * x, 1.3);
        CHECK((a.G - a.G.transpose()).norm() < 1e-15 * a.G.norm());
        CHECK((b.G - a.G / s).norm() < 1e-13 * a.G.norm());
        CHECK((b.P - a.P / (s * s)).norm() < 1e-13 * a.P.norm());
        for (int i = 0; i < 3; ++i) CHECK((b.Sig[i] - a.Sig[i] / (s * s)).norm() < 1e-13 * a.Sig[i].norm() + 1e-300);
    }
}

TEST_CASE("stress kernel matches -P_j delta_ik + eta (dG_ij/dx_k + dG_kj/dx_i)") {
    const double eta = 0.7, h = 1e-5;
    const Vec3 x(0.4, -1.1, 0.8);
    const KernelEval k = oseen(x, eta);
    const auto dG = oseen_gradient(x, eta);
    for (int kk = 0; kk < 3; ++kk) CHECK((dG[kk] - fd_oseen(x, kk, eta, h)).norm() < 1e-8);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) {
                const double expected = -(i == l ? k.P[j] : 0.0) + eta * (dG[l](i, j) + dG[i](l, j));
                CHECK(k.Sig[i](j, l) == doctest::Approx(expected).epsilon(1e-12));
            }
}

TEST_CASE("single sphere field: closed-form example") {
    const StrainRate eps = strain_diag(1.0, -1.0, 0.0);
    const auto f = single_sphere_field(Vec3(2, 0, 0), 1.0, eps, 1.0);
    CHECK(f.disturbance.u[0] == doctest::Approx(-17.0 / 32.0).epsilon(1e-15));
    CHECK(std::abs(f.disturbance.u[1]) < 1e-16);
    CHECK(std::abs(f.disturbance.u[2]) < 1e-16);
    CHECK(f.disturbance.p == doctest::Approx(-5.0 / 8.0).epsilon(1e-15));
    CHECK_THROWS_AS(single_sphere_field(Vec3(0.5, 0, 0), 1.0, eps, 1.0), DomainError);
}

TEST_CASE("single sphere field: no-slip, far field and oddness") {
    std::mt19937_64 g(5);
    const StrainRate eps = strain_diag(0.3, 0.9, -1.2);
    for (int t = 0; t < 100; ++t) {
        const double a = 0.05 + 0.4 * std::uniform_real_distribution<double>()(g);
        const Vec3 w = random_direction(g);
        CHECK(single_sphere_field(a * w, a, eps, 1.0).total.u.norm() < 1e-14);
        const Vec3 far = 1e4 * a * w;
        const auto ff = single_sphere_field(far, a, eps, 1.0);
        CHECK(ff.disturbance.u.norm() * far.squaredNorm() < 10.0 * a * a * a * eps.eps.norm() * 1e4 * a);
        CHECK((ff.total.u - eps.eps * far).norm() < 1e-7 * (eps.eps * far).norm());
        const Vec3 x = (1.1 + 3.0 * std::uniform_real_distribution<double>()(g)) * a * w;
        const auto p = single_sphere_field(x, a, eps, 1.0), m = single_sphere_field(-x, a, eps, 1.0);
        CHECK((p.disturbance.u + m.disturbance.u).norm() < 1e-15);
    }
}

TEST_CASE("single sphere field: analytic gradient and sample invariants") {
    const StrainRate eps = strain_diag(1.0, -0.4, -0.6);
    const double a = 0.3, eta = 1.7, h = 1e-6;
    std::mt19937_64 g(8);
    for (int t = 0; t < 30; ++t) {
        const Vec3 x = (1.1 + 5.0 * std::uniform_real_distribution<double>()(g)) * a * random_direction(g);
        const FieldSample s = single_sphere_field(x, a, eps, eta).total;
        Mat3 fd;
        for (int k = 0; k < 3; ++k) {
            const Vec3 e = h * Vec3::Unit(k);
            fd.col(k) = (single_sphere_field(x + e, a, eps, eta).total.u - single_sphere_field(x - e, a, eps, eta).total.u) / (2 * h);
        }
        CHECK((fd - s.grad).norm() < 1e-7 * (1.0 + s.grad.norm()));
        CHECK((s.e - 0.5 * (s.grad + s.grad.transpose())).norm() < 1e-15);
        CHECK((s.sigma - s.sigma.transpose()).norm() < 1e-14);
        CHECK(s.sigma.trace() == doctest::Approx(-3.0 * s.p + 2.0 * eta * s.e.trace()).epsilon(1e-12));
        CHECK(std::abs(s.grad.trace()) < 1e-12);
    }
}

TEST_CASE("stokes_residual oracle") {
    const StrainRate eps = strain_diag(1.0, -1.0, 0.0);
    const double eta = 1.0;
    SUBCASE("linear flow is exact") {
        const FieldFn lin = [&](const Vec3& x) { return linear_flow(x, eps.eps, eta); };
        const auto [mom, div] = stokes_residual(lin, Vec3(0.3, 0.2, -0.5), 1e-3, eta);
        CHECK(mom < 1e-8);
        CHECK(div < 1e-12);
    }
    SUBCASE("single sphere at 2a and 1.2a") {
        const FieldFn f = [&](const Vec3& x) { return single_sphere_field(x, 1.0, eps, eta).total; };
        const auto [m1, d1] = stokes_residual(f, Vec3(2, 0, 0), 1e-3, eta);
        CHECK(m1 < 1e-6);
        CHECK(d1 < 1e-6);
        const auto [m2, d2] = stokes_residual(f, Vec3(1.2, 0, 0), 1e-4, eta);
        CHECK(m2 < 1e-5);
        CHECK(d2 < 1e-5);
    }
}

TEST_CASE("single sphere properties at random points") {
    const StrainRate eps = strain_diag(0.5, 0.5, -1.0);
    const double a = 0.2, eta = 1.0;
    const FieldFn f = [&](const Vec3& x) { return single_sphere_field(x, a, eps, eta).total; };
    const FieldFn p = [&](const Vec3& x) {
        FieldSample s;
        s.p = single_sphere_field(x, a, eps, eta).disturbance.p;
        return s;
    };
    std::mt19937_64 g(23);
    for (int t = 0; t < 40; ++t) {
        const Vec3 x = (1.1 + 8.9 * std::uniform_real_distribution<double>()(g)) * a * random_direction(g);
        const double h = 1e-3 * x.norm();
        const auto [mom, div] = stokes_residual(f, x, h, eta);
        CHECK(div < 1e-8);
        const double scale = eps.eps.norm() * eta / x.norm();
        CHECK(mom < 1e-5 * std::max(1.0, scale));
        CHECK(stress_divergence_residual(f, x, h) < 1e-5 * std::max(1.0, scale));
        // Harmonic pressure: the Laplacian of p', relative to p'/|x|^2.
        const double hp = 1e-4 * x.norm();
        double lap = 0.0;
        for (int k = 0; k < 3; ++k) {
            const Vec3 e = hp * Vec3::Unit(k);
            lap += (p(x + e).p - 2.0 * p(x).p + p(x - e).p) / (hp * hp);
        }
        const double ref = std::abs(5.0 * a * a * a * eta * eps.eps.norm() / std::pow(x.norm(), 5));
        CHECK(std::abs(lap) < 1e-5 * ref + 1e-9);
    }
}

TEST_CASE("stresslet pressure is the double-layer pressure") {
    // Against the stress-kernel contraction p = -sum_jk 2 eta ... checked through its definition
    // (eta / 2 pi)(tr A / r^3 - 3 x.A.x / r^5) at a simple point.
    Mat3 A = Mat3::Identity();
    const Vec3 x(0, 0, 2);
    const double expect = 1.0 / (2.0 * kPi) * (3.0 / 8.0 - 3.0 * 4.0 / 32.0);
    CHECK(stresslet_pressure(x, A, 1.0) == doctest::Approx(expect).epsilon(1e-14));
}
