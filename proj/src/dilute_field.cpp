#include "stokes_ev/dilute_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sev {

namespace {

constexpr int kBoundaryBand = 32;

Vec3 mismatch_target(const DiluteField& df, std::size_t patch, const Vec3& x) {
    return patch == 0 ? Vec3(df.eps.eps * x) : Vec3(df.eps.eps * df.cfg.centers[patch - 1]);
}

}  // namespace

FieldSample eval_dilute(const DiluteField& df, const Vec3& x) {
    const double eta = df.cfg.eta;
    Vec3 u = df.eps.eps * x;
    Mat3 grad = df.eps.eps;
    double p = 0.0;
    for (const auto& c : df.cfg.centers) {
        if ((x - c).norm() < df.cfg.a * (1.0 - 1e-12)) throw DomainError("point lies inside a sphere");
        const FieldSample d = sphere_disturbance(x - c, df.cfg.a, df.eps.eps, eta);
        u += d.u - df.eps.eps * c;
        grad += d.grad;
        p += d.p;
    }
    if (df.variant == DiluteVariant::UD) u -= df.c_d;
    return make_sample(u, p, grad, eta);
}

std::vector<SphereQuadrature> fluid_boundary_quadrature(const SuspensionConfig& cfg, int band) {
    std::vector<SphereQuadrature> q;
    q.push_back(sphere_quadrature_band(Vec3::Zero(), cfg.R, band));
    for (const auto& c : cfg.centers) q.push_back(sphere_quadrature_band(c, cfg.a, band));
    return q;
}

Vec3 chebyshev_center(const std::vector<Vec3>& mismatch) {
    if (mismatch.empty()) return Vec3::Zero();
    Vec3 lo = mismatch.front(), hi = mismatch.front();
    for (const Vec3& m : mismatch) {
        lo = lo.cwiseMin(m);
        hi = hi.cwiseMax(m);
    }
    return 0.5 * (lo + hi);
}

Vec3 choose_cd(const DiluteField& df, const std::vector<SphereQuadrature>& boundary_quad) {
    DiluteField raw = df;
    raw.variant = DiluteVariant::UMinus;
    std::vector<Vec3> mismatch;
    for (std::size_t s = 0; s < boundary_quad.size(); ++s)
        for (const auto& x : boundary_quad[s].nodes) mismatch.push_back(eval_dilute(raw, x).u - mismatch_target(df, s, x));
    return chebyshev_center(mismatch);
}

double boundary_mismatch_sup(const DiluteField& df, const std::vector<SphereQuadrature>& boundary_quad) {
    double sup = 0.0;
    for (std::size_t s = 0; s < boundary_quad.size(); ++s)
        for (const auto& x : boundary_quad[s].nodes)
            sup = std::max(sup, (eval_dilute(df, x).u - mismatch_target(df, s, x)).norm());
    return sup;
}

DiluteField make_dilute(const SuspensionConfig& cfg, const StrainRate& eps, DiluteVariant variant) {
    DiluteField df{cfg, eps, Vec3::Zero(), variant};
    if (variant == DiluteVariant::UD) df.c_d = choose_cd(df, fluid_boundary_quadrature(cfg, kBoundaryBand));
    return df;
}

EnergyEstimate energy(const FieldFn& field, const BallQuadrature& quad, double eta) {
    std::vector<double> part(quad.size());
    parallel_for(quad.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) part[i] = quad.weights[i] * frob2(field(quad.nodes[i]).e);
    });
    CompensatedSum s;
    for (double v : part) s.add(v);
    return {2.0 * eta * s.value(), quad.rel_err_estimate};
}

EnergyEstimate energy_excess(const FieldFn& field, const BallQuadrature& quad, const SuspensionConfig& cfg,
                             const StrainRate& eps) {
    const double ee = eps.ddot();
    std::vector<double> part(quad.size());
    parallel_for(quad.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) part[i] = quad.weights[i] * (frob2(field(quad.nodes[i]).e) - ee);
    });
    CompensatedSum s;
    for (double v : part) s.add(v);
    const double excess = s.value();
    const double total = 2.0 * cfg.eta * (ee * fluid_volume(cfg) + excess);
    // Only the excess carries quadrature error; scale the rule's own error estimate accordingly.
    const double err = std::abs(2.0 * cfg.eta * excess) * quad.rel_err_estimate / std::max(total, 1e-300);
    return {total, err};
}

double boundary_route_energy(const FieldFn& field, const SuspensionConfig& cfg, int band) {
    const auto quads = fluid_boundary_quadrature(cfg, band);
    CompensatedSum s;
    for (std::size_t k = 0; k < quads.size(); ++k) {
        const auto& q = quads[k];
        const double sign = k == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const FieldSample f = field(q.nodes[i]);
            s.add(q.weights[i] * f.u.dot(f.sigma * (sign * q.normals[i])));
        }
    }
    return s.value();
}

double container_work(const FieldFn& field, const SuspensionConfig& cfg, const StrainRate& eps, int band) {
    const SphereQuadrature q = sphere_quadrature_band(Vec3::Zero(), cfg.R, band);
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i)
        s.add(q.weights[i] * (field(q.nodes[i]).sigma * q.normals[i]).dot(eps.eps * q.nodes[i]));
    return s.value();
}

double effective_viscosity(double E, const SuspensionConfig& cfg, const StrainRate& eps) {
    const double ee = eps.ddot();
    if (!(ee > 0.0)) throw ZeroStrainError("strain rate is zero");
    return E / (2.0 * container_volume(cfg) * ee);
}

ErrorBoundaryData error_boundary_data(const DiluteField& df) {
    ErrorBoundaryData d;
    const Mat3 e = df.eps.eps;
    d.container = [df, e](const Vec3& x) { return Vec3(e * x - eval_dilute(df, x).u); };
    for (const auto& c : df.cfg.centers) {
        const Vec3 target = e * c;
        d.particles.push_back([df, target](const Vec3& x) { return Vec3(target - eval_dilute(df, x).u); });
    }
    return d;
}

ViscosityReport dilute_viscosity(const SuspensionConfig& cfg, const StrainRate& eps, const VolumeRuleOptions& opt) {
    const DiluteField df = make_dilute(cfg, eps, DiluteVariant::UD);
    const FieldFn f = [&df](const Vec3& x) { return eval_dilute(df, x); };
    const VolumeRule rule = fluid_volume_rule(cfg, opt);
    const EnergyEstimate E = energy_excess(f, rule.quad, cfg, eps);

    ViscosityReport r;
    r.N = cfg.N();
    r.R = cfg.R;
    r.a = cfg.a;
    r.c_d = df.c_d;
    r.phi = container_fraction(cfg);
    r.phi_lattice = volume_fraction(cfg);
    r.energy_volume = E.value;
    r.energy_boundary_route = boundary_route_energy(f, cfg, kBoundaryBand);
    r.container_work = container_work(f, cfg, eps, kBoundaryBand);
    r.eta_hat_energy = effective_viscosity(E.value, cfg, eps);
    r.eta_hat_dilute = effective_viscosity(2.0 * r.container_work - E.value, cfg, eps);
    r.einstein = cfg.eta * (1.0 + 2.5 * r.phi);
    r.abs_gap = std::abs(r.eta_hat_dilute - r.einstein);
    r.rel_gap = r.phi > 0.0 ? std::abs(r.eta_hat_dilute / cfg.eta - 1.0 - 2.5 * r.phi) / (2.5 * r.phi) : 0.0;
    const double base = 2.0 * cfg.eta * eps.ddot() * fluid_volume(cfg);
    const double excess_gap = std::abs((E.value - base) - (r.energy_boundary_route - base));
    r.quadrature_rel_err = std::max(E.rel_err, excess_gap / std::max(std::abs(E.value), 1e-300));
    return r;
}

}  // namespace sev
