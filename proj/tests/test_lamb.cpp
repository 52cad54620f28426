#include "stokes_ev/concentric.hpp"
#include "stokes_ev/geometry.hpp"
#include "stokes_ev/lamb.hpp"
#include "stokes_ev/spherical_harmonics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sev;

namespace {

Vec3 random_point(std::mt19937_64& g, double rmin, double rmax) {
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> u(rmin, rmax);
    return u(g) * Vec3(n(g), n(g), n(g)).normalized();
}

double jet_distance(const Jet& a, const Jet& b) {
    return std::abs(a.v - b.v) + (a.g - b.g).norm() + (a.h - b.h).norm();
}

double jet_size(const Jet& a) { return std::abs(a.v) + a.g.norm() + a.h.norm(); }

}  // namespace

TEST_CASE("ladder solid harmonics agree with the direct recurrences") {
    std::mt19937_64 g(4);
    for (bool irregular : {false, true}) {
        for (int t = 0; t < 20; ++t) {
            const Vec3 x = random_point(g, irregular ? 0.8 : 0.2, irregular ? 2.0 : 1.3);
            std::vector<Jet> a, b;
            solid_harmonics(14, x, irregular, a);
            solid_harmonics_direct(14, x, irregular, b);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                CHECK(jet_distance(a[i], b[i]) <= 1e-10 * (1.0 + jet_size(b[i])));
        }
    }
    std::vector<Jet> out;
    CHECK_THROWS_AS(solid_harmonics(63, Vec3(0.3, 0.1, 0.2), false, out), DomainError);
}

TEST_CASE("solid harmonics are harmonic and their gradients match differences") {
    std::mt19937_64 g(9);
    const double h = 1e-6;
    for (bool irregular : {false, true}) {
        const Vec3 x = random_point(g, 0.9, 1.4);
        std::vector<Jet> J, Jp, Jm;
        solid_harmonics(10, x, irregular, J);
        for (std::size_t i = 0; i < J.size(); ++i) CHECK(std::abs(J[i].h.trace()) <= 1e-10 * (1.0 + J[i].h.norm()));
        for (int k = 0; k < 3; ++k) {
            const Vec3 e = h * Vec3::Unit(k);
            solid_harmonics(10, x + e, irregular, Jp);
            solid_harmonics(10, x - e, irregular, Jm);
            for (std::size_t i = 0; i < J.size(); ++i) {
                CHECK(std::abs((Jp[i].v - Jm[i].v) / (2 * h) - J[i].g[k]) <= 1e-7 * (1.0 + J[i].g.norm()));
                CHECK(((Jp[i].g - Jm[i].g) / (2 * h) - J[i].h.col(k)).norm() <= 1e-7 * (1.0 + J[i].h.norm()));
            }
        }
    }
}

TEST_CASE("every Lamb series is a Stokes flow") {
    std::mt19937_64 g(12);
    std::normal_distribution<double> N;
    for (auto kind : {LambSeries::Kind::Interior, LambSeries::Kind::Exterior}) {
        LambSeries s(kind, Vec3(0.1, -0.2, 0.05), 0.7, 6, 1.3);
        for (Eigen::Index i = 0; i < s.basis_size(); ++i) s.coefficients()[i] = N(g);
        const FieldFn f = [&](const Vec3& x) { return s.evaluate(x); };
        for (int t = 0; t < 10; ++t) {
            const Vec3 x = s.center() + random_point(g, kind == LambSeries::Kind::Interior ? 0.1 : 1.0,
                                                     kind == LambSeries::Kind::Interior ? 0.6 : 1.8);
            const FieldSample v = s.evaluate(x);
            CHECK(std::abs(v.grad.trace()) <= 1e-10 * (1.0 + v.grad.norm()));
            const auto [mom, div] = stokes_residual(f, x, 1e-3, 1.3);
            const double scale = 1.0 + v.grad.norm() + std::abs(v.p);
            CHECK(mom <= 1e-6 * scale);
            CHECK(div <= 1e-8 * scale);
            // Velocity agrees with the basis matrix.
            CHECK((s.basis_velocity(x) * s.coefficients() - v.u).norm() <= 1e-12 * (1.0 + v.u.norm()));
        }
    }
}

TEST_CASE("fit reproduces a band-limited series") {
    std::mt19937_64 g(21);
    std::normal_distribution<double> N;
    for (auto kind : {LambSeries::Kind::Interior, LambSeries::Kind::Exterior}) {
        LambSeries ref(kind, Vec3(0.3, 0.0, -0.1), 0.5, 8, 1.0);
        for (Eigen::Index i = 0; i < ref.basis_size(); ++i) ref.coefficients()[i] = N(g);
        LambSeries fitted(kind, ref.center(), ref.scale(), ref.degree(), 1.0);
        fitted.fit([&](const Vec3& x) { return ref.evaluate(x).u; }, 1.0);
        CHECK((fitted.coefficients() - ref.coefficients()).norm() <= 1e-9 * ref.coefficients().norm());
    }
}

TEST_CASE("concentric straining solution") {
    const double a = 0.3, R = 1.5, eta = 1.4;
    StrainRate e = strain_diag(1.0, -0.5, -0.5);
    e.eps(0, 1) = e.eps(1, 0) = 0.3;
    const ConcentricSolution cs(a, R, e.eps, eta);
    std::mt19937_64 g(3);
    const FieldFn f = [&](const Vec3& x) { return cs.evaluate(x); };
    for (int t = 0; t < 30; ++t) {
        const Vec3 w = random_point(g, 1.0, 1.0);
        CHECK(cs.evaluate(a * w).u.norm() <= 1e-13);
        CHECK((cs.evaluate(R * w).u - e.eps * (R * w)).norm() <= 1e-13);
        const Vec3 x = random_point(g, 1.2 * a, 0.95 * R);
        const auto [mom, div] = stokes_residual(f, x, 1e-3, eta);
        CHECK(mom <= 1e-6);
        CHECK(div <= 1e-9);
    }
    // Stresslet and energy against surface quadrature of the traction.
    const auto qa = sphere_quadrature(Vec3::Zero(), a, 21);
    Mat3 S = Mat3::Zero();
    for (std::size_t i = 0; i < qa.size(); ++i) S += qa.weights[i] * cs.radial_traction(qa.nodes[i]) * qa.nodes[i].transpose();
    CHECK((S - cs.stresslet()).norm() <= 1e-12 * S.norm());
    const auto qR = sphere_quadrature(Vec3::Zero(), R, 21);
    double E = 0.0;
    for (std::size_t i = 0; i < qR.size(); ++i) E += qR.weights[i] * cs.evaluate(qR.nodes[i]).u.dot(cs.radial_traction(qR.nodes[i]));
    CHECK(E == doctest::Approx(cs.energy()).epsilon(1e-12));
    // The particle raises the dissipation above the particle-free value 2 eta |B_R| eps:eps.
    CHECK(cs.energy() > 2.0 * eta * (4.0 * M_PI / 3.0) * R * R * R * e.ddot());
}
