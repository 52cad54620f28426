#include "stokes_ev/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sev {

namespace {

struct Shell {
    Vec3 c;
    double inner;
    double outer;
};

std::vector<Shell> shells_for(const SuspensionConfig& cfg, double shell_radius) {
    std::vector<Shell> out;
    for (std::size_t l = 0; l < cfg.N(); ++l) {
        double rs = std::min(shell_radius, cfg.R - cfg.centers[l].norm());
        for (std::size_t m = 0; m < cfg.N(); ++m)
            if (m != l) rs = std::min(rs, 0.5 * (cfg.centers[l] - cfg.centers[m]).norm());
        if (!(rs > cfg.a)) throw DomainError("no room for a quadrature shell around a sphere");
        out.push_back({cfg.centers[l], cfg.a + 0.1 * (rs - cfg.a), rs});
    }
    return out;
}

}  // namespace

VolumeRule fluid_volume_rule(const SuspensionConfig& cfg, const VolumeRuleOptions& opt) {
    const std::vector<Shell> shells = shells_for(cfg, opt.shell_radius);
    VolumeRule rule;
    auto& q = rule.quad;

    const SphereQuadrature shell_dirs = sphere_quadrature_band(Vec3::Zero(), 1.0, opt.shell_band);
    for (std::size_t l = 0; l < shells.size(); ++l) {
        const Shell& s = shells[l];
        // Panels widen geometrically away from the sphere surface.
        const int K = opt.shell_panels;
        const double span = s.outer - cfg.a;
        const double total = std::pow(2.0, K) - 1.0;
        for (int k = 0; k < K; ++k) {
            const double r0 = cfg.a + span * (std::pow(2.0, k) - 1.0) / total;
            const double r1 = cfg.a + span * (std::pow(2.0, k + 1) - 1.0) / total;
            GaussRule g = gauss_legendre(opt.shell_points, r0, r1);
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                const double r = g.x[i];
                const double psi = smooth_bump(r, s.inner, s.outer);
                if (psi <= 0.0) continue;
                for (std::size_t j = 0; j < shell_dirs.size(); ++j) {
                    q.nodes.push_back(s.c + r * shell_dirs.normals[j]);
                    q.weights.push_back(psi * r * r * g.w[i] * shell_dirs.weights[j]);
                    rule.owner.push_back(static_cast<int>(l));
                }
            }
        }
    }

    const SphereQuadrature outer_dirs = sphere_quadrature_band(Vec3::Zero(), 1.0, opt.outer_band);
    const int panels = std::max(1, static_cast<int>(std::ceil(cfg.R / opt.outer_panel_width)));
    for (int k = 0; k < panels; ++k) {
        GaussRule g = gauss_legendre(opt.outer_points, cfg.R * k / panels, cfg.R * (k + 1) / panels);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double r = g.x[i];
            for (std::size_t j = 0; j < outer_dirs.size(); ++j) {
                const Vec3 x = r * outer_dirs.normals[j];
                double keep = 1.0;
                for (const auto& s : shells) keep -= smooth_bump((x - s.c).norm(), s.inner, s.outer);
                if (keep <= 0.0) continue;
                q.nodes.push_back(x);
                q.weights.push_back(keep * r * r * g.w[i] * outer_dirs.weights[j]);
                rule.owner.push_back(-1);
            }
        }
    }
    q.target_rel_err = 0.0;
    q.rel_err_estimate = std::abs(q.weight_sum() - fluid_volume(cfg)) / fluid_volume(cfg);
    return rule;
}

}  // namespace sev
