#include "stokes_ev/inequality_audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace sev {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

double beta_constant(double a, double d, double R) {
    return std::pow(2.0, 0.125) * std::sqrt(1.0 + 6.0 / d) * std::pow(d / 2.0 + 1.0 / a + kSqrt2, 0.25) +
           std::pow(2.0, -0.25) * std::sqrt(1.0 + 3.0 / (R - d / 2.0)) * std::pow(1.0 + R / 3.0, 0.25);
}

std::array<double, 5> constants_for(const std::array<double, 4>& delta, double a, double d) {
    const auto [d1, d2, d3, d4] = delta;
    const double h = d / 2.0 - a;
    const double q = 1.0 + 1.0 / (4.0 * d2);
    return {
        kSqrt2 / 2.0 - std::sqrt(q * d4 / h),
        kSqrt2 / 2.0 * (1.0 + std::sqrt(1.0 / d1)),
        std::sqrt(d1) + std::sqrt(q * d3 / h),
        std::sqrt(1.0 / h) * std::sqrt(q) * (std::sqrt(1.0 / (4.0 * d3)) + std::sqrt(1.0 / (4.0 * d4))),
        std::sqrt(d2 / h),
    };
}

ConstantLedger ledger(double a, double d, double R) {
    if (!(a > 0.0 && 2.0 * a < d && d < R)) throw DomainError("ledger needs 0 < 2a < d < R");
    ConstantLedger L;
    L.a = a;
    L.d = d;
    L.R = R;
    L.beta = beta_constant(a, d, R);
    const double s = 1.0 + kSqrt2;
    const double d1 = std::ldexp(1.0, -11);
    const double d2 = std::ldexp(1.0, -10) * (d - 2.0 * a) / (s * s * L.beta * L.beta);
    const double d3 = std::ldexp(1.0, -10) * d2 * (d - 2.0 * a) / (4.0 * d2 + 1.0);
    const double d4 = std::ldexp(1.0, 8) * d3;
    L.delta = {d1, d2, d3, d4};
    const auto C = constants_for(L.delta, a, d);
    L.C1 = C[0];
    L.C2 = C[1];
    L.C3 = C[2];
    L.C4 = C[3];
    L.C5 = C[4];
    L.x = (L.C3 + s * L.C5 * L.beta) / L.C1;
    L.C6 = (1.0 + L.x) / (1.0 - L.x);
    L.k_wall = 10.0 / 7.0 * (6.0 / R + 3.0 * L.C4 / (2.0 * kSqrt2));
    L.k_sphere = 60.0 / (7.0 * a);
    L.k_tangent = 10.0 / 7.0 * (0.75 + 25.0 * kSqrt2);
    return L;
}

AuditResult make_audit(const std::string& id, const std::string& field_id, double lhs, double rhs, double tol) {
    AuditResult r;
    r.id = id;
    r.field_id = field_id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tol = tol;
    r.pass = r.margin >= -tol * std::abs(rhs);
    return r;
}

std::vector<AuditResult> audit(const BoundaryNorms& n, const ConstantLedger& L, const SuspensionConfig& cfg,
                               const std::string& field_id, double tol) {
    const double eta = cfg.eta;
    std::vector<AuditResult> out;
    out.push_back(make_audit("t_estimate", field_id, n.t, n.p + eta * n.dudn + kSqrt2 * eta * n.dtau_sum(), tol));
    if (n.has_volume) {
        out.push_back(make_audit("dudn_estimate", field_id, L.C1 * n.dudn,
                                 L.C2 * n.dtau_sum() + L.C3 / eta * n.p + L.C4 * n.u + L.C5 / eta * n.p_volume, tol));
        out.push_back(make_audit("p_inequality", field_id, n.p_volume, (1.0 + kSqrt2) * L.beta * n.p, tol));
    }
    const double a_term = cfg.N() > 0 ? 3.0 * eta / cfg.a * n.u_spheres : 0.0;
    out.push_back(make_audit("p_bdy_estimate", field_id, n.p,
                             0.5 * n.t + a_term + 3.0 * eta / cfg.R * n.u_container + eta * n.dudn, tol));
    const double sphere_term = cfg.N() > 0 ? eta * L.k_sphere * n.u_spheres : 0.0;
    out.push_back(make_audit("final_estimate_traction", field_id, n.t,
                             eta * L.k_wall * n.u + sphere_term + eta * L.k_tangent * n.dtau_sum(), tol));
    out.push_back(make_audit("incompressibility", field_id, n.incompressibility_lhs, n.incompressibility_rhs, tol));
    return out;
}

NormalExtension normal_extension(const SuspensionConfig& cfg, const Vec3& x) {
    NormalExtension e;
    const double h = cfg.d / 2.0;
    // f(r) omega with omega the unit radial direction: grad = f' ww^T + (f/r)(I - ww^T), div = f' + 2f/r.
    auto radial = [&](const Vec3& y, double f, double df) {
        const double r = y.norm();
        const Vec3 w = y / r;
        const Mat3 ww = w * w.transpose();
        e.value = f * w;
        e.grad = df * ww + (f / r) * (Mat3::Identity() - ww);
        e.div = df + 2.0 * f / r;
    };
    for (const auto& c : cfg.centers) {
        const Vec3 y = x - c;
        const double r = y.norm();
        // Surface points computed as c + a w can land an ulp inside the sphere.
        if (r >= cfg.a * (1.0 - 1e-13) && r < h) {
            radial(y, -(h - r) / (h - cfg.a), 1.0 / (h - cfg.a));
            return e;
        }
    }
    const double r = x.norm();
    if (r > cfg.R - h && r <= cfg.R * (1.0 + 1e-13)) radial(x, (r - cfg.R + h) / h, 1.0 / h);
    return e;
}

std::vector<AuditResult> normal_extension_check(const SuspensionConfig& cfg, std::size_t samples,
                                                std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto direction = [&]() {
        const double z = 2.0 * U(gen) - 1.0, phi = 2.0 * std::acos(-1.0) * U(gen);
        const double s = std::sqrt(1.0 - z * z);
        return Vec3(s * std::cos(phi), s * std::sin(phi), z);
    };
    const double h = cfg.d / 2.0;
    const std::string fid = "normal_extension";
    double bdy_err = 0.0, edge = 0.0, vmax = 0.0, gmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    const std::size_t shells = cfg.N() + 1;
    for (std::size_t k = 0; k < samples; ++k) {
        const std::size_t s = k % shells;
        const Vec3 w = direction();
        const Vec3 c = s == 0 ? Vec3::Zero() : cfg.centers[s - 1];
        const double r0 = s == 0 ? cfg.R - h : cfg.a;
        const double r1 = s == 0 ? cfg.R : h;
        const double r = r0 + (r1 - r0) * U(gen);
        const NormalExtension e = normal_extension(cfg, c + r * w);
        vmax = std::max(vmax, e.value.norm());
        gmax = std::max(gmax, Eigen::JacobiSVD<Mat3>(e.grad).singularValues()[0]);
        dmin = std::min(dmin, e.div);
        // Boundary value (fluid normal) and vanishing at the inner edge.
        const Vec3 nb = s == 0 ? w : Vec3(-w);
        const Vec3 xb = s == 0 ? Vec3(cfg.R * w) : Vec3(c + cfg.a * w);
        bdy_err = std::max(bdy_err, (normal_extension(cfg, xb).value - nb).norm());
        const Vec3 xe = s == 0 ? Vec3((cfg.R - h) * w * (1.0 + 1e-15)) : Vec3(c + h * (1.0 - 1e-15) * w);
        edge = std::max(edge, normal_extension(cfg, xe).value.norm());
    }
    std::vector<AuditResult> out;
    out.push_back(make_audit("N_boundary_value", fid, bdy_err, 1e-12, 0.0));
    out.push_back(make_audit("N_vanishes_at_shell_edge", fid, edge, 1e-12, 0.0));
    out.push_back(make_audit("N_bounded_by_one", fid, vmax, 1.0 + 1e-12, 0.0));
    const double gbound = cfg.N() > 0 ? 1.0 / (h - cfg.a) : 1.0 / h;
    out.push_back(make_audit("N_gradient_bound", fid, gmax, gbound + 1e-9, 0.0));
    out.push_back(make_audit("N_divergence_nonnegative", fid, -dmin, 0.0, 0.0));
    return out;
}

void write_audit_csv(std::ostream& os, const std::vector<AuditResult>& results) {
    os << "inequality_id,field_id,lhs,rhs,margin,pass\n";
    char buf[256];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%d\n", r.id.c_str(), r.field_id.c_str(), r.lhs, r.rhs,
                      r.margin, r.pass ? 1 : 0);
        os << buf;
    }
}

}  // namespace sev
