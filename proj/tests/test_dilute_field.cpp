#include "stokes_ev/dilute_field.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sev;

namespace {

constexpr double kPi = std::numbers::pi;

double ball_volume(double R) { return 4.0 * kPi / 3.0 * R * R * R; }

// u^- written literally: eps x + sum_l [u1(x - x^l) - eps x].
Vec3 literal_u_minus(const SuspensionConfig& cfg, const StrainRate& eps, const Vec3& x) {
    Vec3 u = eps.eps * x;
    for (const auto& c : cfg.centers) u += single_sphere_field(x - c, cfg.a, eps, cfg.eta).total.u - eps.eps * x;
    return u;
}

}  // namespace

TEST_CASE("one sphere at the origin reproduces the single-sphere field") {
    const auto cfg = config_from_centers(3.0, 0.4, 1.2, {Vec3::Zero()});
    const StrainRate eps = strain_diag(0.7, -1.0, 0.3);
    const DiluteField df = make_dilute(cfg, eps, DiluteVariant::UMinus);
    CHECK(df.c_d.isZero());
    std::mt19937_64 g(1);
    std::normal_distribution<double> N;
    for (int t = 0; t < 30; ++t) {
        const Vec3 x = (0.4 + 2.5 * std::abs(N(g)) / 3.0 + 0.01) * Vec3(N(g), N(g), N(g)).normalized();
        if (x.norm() >= 3.0) continue;
        const FieldSample a = eval_dilute(df, x), b = single_sphere_field(x, 0.4, eps, 1.2).total;
        CHECK((a.u - b.u).norm() <= 1e-15 * (1.0 + b.u.norm()));
        CHECK((a.grad - b.grad).norm() <= 1e-14 * (1.0 + b.grad.norm()));
        CHECK(a.p == doctest::Approx(b.p).epsilon(1e-14));
    }
    // No-slip on the particle.
    for (int t = 0; t < 10; ++t) CHECK(eval_dilute(df, 0.4 * Vec3(N(g), N(g), N(g)).normalized()).u.norm() < 1e-14);
    CHECK_THROWS_AS(eval_dilute(df, Vec3(0.1, 0, 0)), DomainError);
}

TEST_CASE("seven-sphere superposition matches the term-by-term formula near the wall") {
    const auto cfg = config_from_centers(2.5, 0.3, 1.0, nearest_neighbour_cross());
    const StrainRate eps = strain_diag(1.0, -0.5, -0.5);
    const DiluteField df = make_dilute(cfg, eps, DiluteVariant::UMinus);
    for (const Vec3& x : {Vec3(0, 0, 2.4), Vec3(1.3, 0.9, -1.6), Vec3(0.5, 0.5, 0.5)}) {
        const Vec3 ref = literal_u_minus(cfg, eps, x);
        CHECK((eval_dilute(df, x).u - ref).norm() <= 1e-14 * (1.0 + ref.norm()));
    }
    const DiluteField dd = make_dilute(cfg, eps, DiluteVariant::UD);
    const Vec3 x(0.2, -1.7, 0.4);
    CHECK((eval_dilute(dd, x).u - (eval_dilute(df, x).u - dd.c_d)).norm() < 1e-15);
    CHECK((eval_dilute(dd, x).grad - eval_dilute(df, x).grad).norm() == 0.0);
}

TEST_CASE("chebyshev centre of a mismatch") {
    SUBCASE("constant mismatch is removed exactly") {
        const Vec3 v(0.3, -1.2, 4.0);
        const std::vector<Vec3> m(17, v);
        CHECK(chebyshev_center(m) == v);
    }
    SUBCASE("odd mismatch on a symmetric node set gives zero") {
        const auto q = sphere_quadrature(Vec3::Zero(), 1.0, 9);
        std::vector<Vec3> m;
        for (const auto& x : q.nodes) m.push_back(Vec3(x[0] * x[0] * x[0], x[1], x[0] * x[1] * x[2]));
        CHECK(chebyshev_center(m).norm() < 1e-15);
    }
    CHECK(chebyshev_center({}).isZero());
}

TEST_CASE("C^d for seven spheres lowers the boundary sup mismatch") {
    const auto cfg = config_from_centers(3.0, 0.2, 1.0, nearest_neighbour_cross());
    const StrainRate eps = strain_diag(1.0, -0.3, -0.7);
    const auto bq = fluid_boundary_quadrature(cfg, 20);
    DiluteField df = make_dilute(cfg, eps, DiluteVariant::UMinus);
    const double raw = boundary_mismatch_sup(df, bq);
    df.variant = DiluteVariant::UD;
    df.c_d = choose_cd(df, bq);
    CHECK(df.c_d.allFinite());
    CHECK(boundary_mismatch_sup(df, bq) <= raw);
    // Shifting C^d along any axis never helps the componentwise sup norm.
    for (int k = 0; k < 3; ++k)
        for (double s : {-1e-4, 1e-4}) {
            DiluteField moved = df;
            moved.c_d[k] += s;
            double before = 0.0, after = 0.0;
            for (std::size_t p = 0; p < bq.size(); ++p)
                for (const auto& x : bq[p].nodes) {
                    const Vec3 target = p == 0 ? Vec3(eps.eps * x) : Vec3(eps.eps * cfg.centers[p - 1]);
                    before = std::max(before, std::abs((eval_dilute(df, x).u - target)[k]));
                    after = std::max(after, std::abs((eval_dilute(moved, x).u - target)[k]));
                }
            CHECK(after >= before - 1e-15);
        }
}

TEST_CASE("energy of simple flows") {
    const StrainRate eps = strain_diag(1.0, -0.5, -0.5);
    SUBCASE("eps x in the empty ball") {
        const auto cfg = config_from_centers(1.7, 0.1, 1.3, {});
        const auto rule = fluid_volume_rule(cfg);
        const FieldFn lin = [&](const Vec3& x) { return linear_flow(x, eps.eps, 1.3); };
        const double exact = 2.0 * 1.3 * ball_volume(1.7) * eps.ddot();
        CHECK(energy_excess(lin, rule.quad, cfg, eps).value == doctest::Approx(exact).epsilon(1e-14));
        CHECK(energy(lin, rule.quad, 1.3).value == doctest::Approx(exact).epsilon(1e-4));
        CHECK(boundary_route_energy(lin, cfg, 12) == doctest::Approx(exact).epsilon(1e-12));
        CHECK(effective_viscosity(exact, cfg, eps) == doctest::Approx(1.3).epsilon(1e-15));
    }
    SUBCASE("rigid motion dissipates nothing") {
        const auto cfg = config_from_centers(2.0, 0.3, 1.0, {Vec3::Zero()});
        const auto rule = fluid_volume_rule(cfg);
        const Vec3 v(0.3, 0.1, -2.0), w(1.0, -0.4, 0.2);
        const FieldFn rigid = [&](const Vec3& x) {
            Mat3 W;
            W << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
            FieldSample s;
            s.u = v + w.cross(x);
            s.grad = W;
            s.e = 0.5 * (W + W.transpose());
            return s;
        };
        CHECK(std::abs(energy(rigid, rule.quad, 1.0).value) < 1e-15);
        CHECK(std::abs(boundary_route_energy(rigid, cfg, 12)) < 1e-12);
    }
}

TEST_CASE("effective viscosity is linear in E and rejects zero strain") {
    const auto cfg = config_from_centers(2.0, 0.3, 1.0, {});
    const StrainRate eps = strain_diag(2.0, -1.0, -1.0);
    const double E = 2.0 * ball_volume(2.0) * eps.ddot();
    CHECK(effective_viscosity(E, cfg, eps) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(effective_viscosity(2.0 * E, cfg, eps) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(effective_viscosity(E, cfg, StrainRate{}), ZeroStrainError);
}

TEST_CASE("dilute energy for one small sphere in a large container") {
    const auto cfg = config_from_centers(20.0, 0.1, 1.0, {Vec3::Zero()});
    const StrainRate eps = strain_diag(1.0, -0.5, -0.5);
    const auto r = dilute_viscosity(cfg, eps);
    const double phi = r.phi;
    CHECK(phi == doctest::Approx(0.001 / 8000.0).epsilon(1e-14));
    CHECK(r.eta_hat_energy == doctest::Approx(1.0 + 2.5 * phi).epsilon(1e-2));
    CHECK(r.energy_boundary_route == doctest::Approx(r.energy_volume).epsilon(1e-8));
    MESSAGE("E(u^d) route: eta_hat - 1 = " << r.eta_hat_energy - 1.0 << ", J route: " << r.eta_hat_dilute - 1.0
                                          << ", 5 phi / 2 = " << 2.5 * phi);
}

TEST_CASE("dilute viscosity: bounds, strain scaling and finiteness") {
    const StrainRate eps = strain_diag(1.0, -0.5, -0.5);
    for (const auto& cfg : {config_from_centers(4.0, 0.15, 1.0, nearest_neighbour_cross()),
                            config_from_centers(6.0, 0.2, 1.0, {Vec3::Zero()}), build_config(2.6, 0.12, 1.0)}) {
        const auto r = dilute_viscosity(cfg, eps);
        CHECK(r.eta_hat_dilute >= cfg.eta);
        CHECK(r.eta_hat_energy >= cfg.eta);
        CHECK(std::isfinite(r.abs_gap));
        CHECK(std::isfinite(r.rel_gap));
        CHECK(r.einstein == doctest::Approx(cfg.eta * (1.0 + 2.5 * r.phi)).epsilon(1e-15));
        CHECK(r.N == cfg.N());
    }
    const auto cfg = config_from_centers(4.0, 0.15, 1.0, nearest_neighbour_cross());
    const StrainRate eps3{3.0 * eps.eps};
    const auto a = dilute_viscosity(cfg, eps), b = dilute_viscosity(cfg, eps3);
    CHECK(b.energy_volume == doctest::Approx(9.0 * a.energy_volume).epsilon(1e-12));
    CHECK(b.eta_hat_dilute == doctest::Approx(a.eta_hat_dilute).epsilon(1e-12));
    CHECK(b.eta_hat_energy == doctest::Approx(a.eta_hat_energy).epsilon(1e-12));
}

TEST_CASE("boundary mismatch shrinks like a^3") {
    const StrainRate eps = strain_diag(1.0, -0.5, -0.5);
    const auto sup_for = [&](double a) {
        const auto cfg = config_from_centers(3.0, a, 1.0, nearest_neighbour_cross());
        const auto df = make_dilute(cfg, eps, DiluteVariant::UD);
        const auto bq = fluid_boundary_quadrature(cfg, 20);
        double sup = 0.0;
        for (const auto& x : bq[0].nodes) sup = std::max(sup, (eval_dilute(df, x).u - eps.eps * x).norm());
        return sup;
    };
    const double ratio = sup_for(0.2) / sup_for(0.1);
    MESSAGE("sup mismatch ratio a = 0.2 / 0.1: " << ratio);
    CHECK(ratio >= 4.0);
    CHECK(ratio <= 16.0);
}

TEST_CASE("error boundary data") {
    const StrainRate eps = strain_diag(1.0, -1.0, 0.0);
    SUBCASE("one sphere: particle data is C^d, container data is -(u1' - C^d)") {
        const auto cfg = config_from_centers(3.0, 0.3, 1.0, {Vec3::Zero()});
        DiluteField df = make_dilute(cfg, eps, DiluteVariant::UD);
        df.c_d = Vec3(0.01, -0.02, 0.03);
        const auto d = error_boundary_data(df);
        REQUIRE(d.particles.size() == 1);
        const Vec3 xs = 0.3 * Vec3(1, 2, -2) / 3.0;
        CHECK((d.particles[0](xs) - df.c_d).norm() < 1e-15);
        const Vec3 xc = 3.0 * Vec3(0.6, 0.0, 0.8);
        const Vec3 theta = single_sphere_field(xc, 0.3, eps, 1.0).disturbance.u - df.c_d;
        CHECK((d.container(xc) + theta).norm() < 1e-15);
    }
    SUBCASE("two spheres: data on sphere 1 is minus the disturbance of sphere 2 plus C^d") {
        const Vec3 c1(-0.6, 0, 0), c2(0.6, 0, 0);
        const auto cfg = config_from_centers(3.0, 0.3, 1.0, {c1, c2});
        const DiluteField df = make_dilute(cfg, eps, DiluteVariant::UD);
        const auto d = error_boundary_data(df);
        for (const Vec3& w : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-0.6, 0, 0.8)}) {
            const Vec3 x = c1 + 0.3 * w;
            const Vec3 theta = single_sphere_field(x - c2, 0.3, eps, 1.0).disturbance.u - df.c_d;
            CHECK((d.particles[0](x) + theta).norm() < 1e-14);
        }
    }
    SUBCASE("data norm decreases as a shrinks") {
        const auto norm_for = [&](double a) {
            const auto cfg = config_from_centers(3.0, a, 1.0, nearest_neighbour_cross());
            const auto d = error_boundary_data(make_dilute(cfg, eps, DiluteVariant::UD));
            const auto bq = fluid_boundary_quadrature(cfg, 16);
            double s = 0.0;
            for (std::size_t p = 0; p < bq.size(); ++p)
                for (std::size_t i = 0; i < bq[p].size(); ++i) {
                    const Vec3 v = p == 0 ? d.container(bq[p].nodes[i]) : d.particles[p - 1](bq[p].nodes[i]);
                    s += bq[p].weights[i] * v.squaredNorm();
                }
            return std::sqrt(s);
        };
        CHECK(norm_for(0.1) < norm_for(0.2));
    }
}
