#include "stokes_ev/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sev;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("build_config enumerates lattice points with |z| < R - 1") {
    SUBCASE("R = 1.5 gives the origin only") {
        const auto cfg = build_config(1.5, 0.1, 1.0);
        REQUIRE(cfg.N() == 1);
        CHECK(cfg.centers[0].norm() == 0.0);
    }
    SUBCASE("R = 2.5 admits faces and edges of the unit cube (19 points)") {
        // |z| < 1.5 keeps the origin, 6 face neighbours and 12 edge points; corners sit at sqrt3.
        const auto cfg = build_config(2.5, 0.3, 1.0);
        CHECK(cfg.N() == 19);
        for (const auto& c : cfg.centers) CHECK(c.norm() < 1.5);
    }
    SUBCASE("lexicographic order") {
        const auto cfg = build_config(3.2, 0.2, 1.0);
        for (std::size_t i = 1; i < cfg.N(); ++i) {
            const Vec3 &p = cfg.centers[i - 1], &q = cfg.centers[i];
            const bool ordered = p[0] < q[0] || (p[0] == q[0] && (p[1] < q[1] || (p[1] == q[1] && p[2] < q[2])));
            CHECK(ordered);
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(build_config(2.0, 0.5, 1.0), OverlapError);
        CHECK_THROWS_AS(build_config(1.0, 0.2, 1.0), EmptyError);
        CHECK_THROWS_AS(build_config(3.0, 0.2, 0.0), ConfigError);
    }
}

TEST_CASE("every accepted config keeps spheres apart and inside") {
    for (double R : {1.5, 2.2, 3.0, 4.1})
        for (double a : {0.05, 0.2, 0.45}) {
            if (!(R > 1.0 + a)) continue;
            const auto cfg = build_config(R, a, 1.0);
            for (std::size_t i = 0; i < cfg.N(); ++i) {
                CHECK(cfg.centers[i].norm() + a < R);
                for (std::size_t j = 0; j < i; ++j) CHECK((cfg.centers[i] - cfg.centers[j]).norm() >= 1.0);
            }
        }
}

TEST_CASE("lambda set uses |z| + d/2 - a < R") {
    CHECK(in_lambda(Vec3(1, 0, 0), 1.3, 0.25));
    CHECK_FALSE(in_lambda(Vec3(1, 0, 0), 1.2, 0.25));
    for (const auto& z : lambda_set(3.0, 0.3)) CHECK(z.norm() + 0.5 - 0.3 < 3.0);
}

TEST_CASE("config_from_centers validates its input") {
    CHECK_NOTHROW(config_from_centers(4.0, 0.18, 1.0, nearest_neighbour_cross()));
    CHECK_THROWS_AS(config_from_centers(1.2, 0.3, 1.0, {Vec3(1, 0, 0)}), ConfigError);
    CHECK_THROWS_AS(config_from_centers(4.0, 0.3, 1.0, {Vec3(0, 0, 0), Vec3(0.5, 0, 0)}), OverlapError);
}

TEST_CASE("volume fractions") {
    CHECK(volume_fraction(0.0) == 0.0);
    CHECK(volume_fraction(0.5) == doctest::Approx(kPi / 6.0).epsilon(1e-15));
    CHECK(volume_fraction(0.3) == doctest::Approx(0.1130973355292326).epsilon(1e-14));
    double prev = 0.0;
    for (double a = 0.01; a < 0.5; a += 0.01) {
        const double phi = volume_fraction(a);
        CHECK(phi > prev);
        CHECK(phi < kPi / 6.0);
        prev = phi;
    }
    const auto cfg = config_from_centers(10.0, 0.1, 1.0, {Vec3::Zero()});
    CHECK(container_fraction(cfg) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(fluid_volume(cfg) == doctest::Approx(4.0 * kPi / 3.0 * (1000.0 - 1e-3)).epsilon(1e-14));
}

TEST_CASE("strain rate validation") {
    CHECK_NOTHROW(strain_diag(1.0, -0.5, -0.5));
    CHECK_THROWS_AS(strain_diag(1.0, 0.0, 0.0), DomainError);
    Mat3 m = Mat3::Zero();
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(make_strain(m), DomainError);
    m(1, 0) = 1.0;
    CHECK(make_strain(m).ddot() == doctest::Approx(2.0));
}

TEST_CASE("sphere quadrature: area, zero mean normal and polynomial exactness") {
    for (int band : {3, 8, 17}) {
        const Vec3 c(0.3, -0.2, 1.1);
        const double r = 1.7;
        const auto q = sphere_quadrature_band(c, r, band);
        CompensatedSum area;
        Vec3 n = Vec3::Zero();
        for (std::size_t i = 0; i < q.size(); ++i) {
            area.add(q.weights[i]);
            n += q.weights[i] * q.normals[i];
            CHECK((q.nodes[i] - c).norm() == doctest::Approx(r).epsilon(1e-14));
        }
        CHECK(area.value() == doctest::Approx(4.0 * kPi * r * r).epsilon(1e-12));
        CHECK(n.norm() < 1e-12 * r * r);
        // int x^2 y^2 z^2 over the unit sphere = 4 pi / 105 (degree 6).
        if (band >= 3) {
            CompensatedSum s;
            for (std::size_t i = 0; i < q.size(); ++i) {
                const Vec3& w = q.normals[i];
                s.add(q.weights[i] / (r * r) * w[0] * w[0] * w[1] * w[1] * w[2] * w[2]);
            }
            CHECK(s.value() == doctest::Approx(4.0 * kPi / 105.0).epsilon(1e-12));
        }
    }
    // Order 17 (band 8) integrates z^16 exactly: 4 pi / 17.
    const auto q = sphere_quadrature(Vec3::Zero(), 1.0, 17);
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i) s.add(q.weights[i] * std::pow(q.normals[i][2], 16));
    CHECK(s.value() == doctest::Approx(4.0 * kPi / 17.0).epsilon(1e-12));
}

TEST_CASE("ball quadrature") {
    SUBCASE("N = 0, R = 1") {
        const auto cfg = config_from_centers(1.0, 0.1, 1.0, {});
        const auto q = ball_quadrature(cfg, 1e-3, 3);
        CHECK(std::abs(q.weight_sum() - 4.0 * kPi / 3.0) <= 1e-3 * 4.0 * kPi / 3.0);
    }
    SUBCASE("seven spheres, R = 2.5, a = 0.3") {
        const auto cfg = config_from_centers(2.5, 0.3, 1.0, nearest_neighbour_cross());
        const auto q = ball_quadrature(cfg, 5e-3, 5);
        const double exact = 4.0 * kPi / 3.0 * (2.5 * 2.5 * 2.5 - 7 * 0.027);
        CHECK(std::abs(q.weight_sum() - exact) <= 3.0 * q.rel_err_estimate * exact);
        for (const auto& x : q.nodes) CHECK(in_fluid(cfg, x));
    }
    SUBCASE("determinism") {
        const auto cfg = config_from_centers(2.5, 0.3, 1.0, nearest_neighbour_cross());
        const auto q1 = ball_quadrature(cfg, 1e-2, 9);
        const auto q2 = ball_quadrature(cfg, 1e-2, 9);
        REQUIRE(q1.size() == q2.size());
        bool same = true;
        for (std::size_t i = 0; i < q1.size(); ++i) same = same && q1.nodes[i] == q2.nodes[i] && q1.weights[i] == q2.weights[i];
        CHECK(same);
    }
    SUBCASE("errors") {
        const auto cfg = config_from_centers(2.5, 0.3, 1.0, nearest_neighbour_cross());
        CHECK_THROWS_AS(ball_quadrature(cfg, 1e-7, 1), DomainError);
        CHECK_THROWS_AS(ball_quadrature(cfg, 2e-6, 1, 20000), BudgetError);
    }
}

TEST_CASE("deterministic volume rule integrates the fluid volume") {
    const auto cfg = config_from_centers(2.5, 0.3, 1.0, nearest_neighbour_cross());
    const auto rule = fluid_volume_rule(cfg);
    // The rule targets smooth excess integrands; raw volume and moments come out to about 3e-5.
    CHECK(rule.quad.weight_sum() == doctest::Approx(fluid_volume(cfg)).epsilon(1e-4));
    // x^2 over the fluid: ball part 4 pi R^5 / 15 minus each sphere's (4 pi a^3/3)(|c_x|^2 + a^2/5).
    CompensatedSum s;
    for (std::size_t i = 0; i < rule.quad.size(); ++i) s.add(rule.quad.weights[i] * std::pow(rule.quad.nodes[i][0], 2));
    double exact = 4.0 * kPi * std::pow(2.5, 5) / 15.0;
    for (const auto& c : cfg.centers) exact -= 4.0 * kPi / 3.0 * 0.027 * (c[0] * c[0] + 0.09 / 5.0);
    CHECK(s.value() == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("smooth bump") {
    CHECK(smooth_bump(0.1, 0.2, 0.5) == 1.0);
    CHECK(smooth_bump(0.6, 0.2, 0.5) == 0.0);
    double prev = 1.0;
    for (double r = 0.2; r <= 0.5; r += 0.01) {
        const double b = smooth_bump(r, 0.2, 0.5);
        CHECK(b <= prev + 1e-15);
        prev = b;
    }
}
