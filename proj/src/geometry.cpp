#include "stokes_ev/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sev {

namespace {

constexpr double kPi = std::numbers::pi;

void check_common(double a, double eta) {
    if (!(a > 0.0)) throw ConfigError("sphere radius must be positive");
    if (a >= 0.5) throw OverlapError("sphere radius a >= 1/2: neighbouring spheres touch or overlap");
    if (!(eta > 0.0)) throw ConfigError("viscosity must be positive");
}

}  // namespace

SuspensionConfig build_config(double R, double a, double eta) {
    check_common(a, eta);
    if (!(R > 1.0)) throw EmptyError("no lattice point satisfies |z| < R - 1");
    if (!(R > 1.0 + a)) throw ConfigError("container radius must exceed 1 + a");
    SuspensionConfig cfg;
    cfg.R = R;
    cfg.a = a;
    cfg.eta = eta;
    const int k = static_cast<int>(std::ceil(R));
    for (int i = -k; i <= k; ++i)
        for (int j = -k; j <= k; ++j)
            for (int l = -k; l <= k; ++l) {
                Vec3 z(i, j, l);
                if (z.norm() < R - 1.0) cfg.centers.push_back(z);
            }
    if (cfg.centers.empty()) throw EmptyError("no lattice point satisfies |z| < R - 1");
    return cfg;
}

SuspensionConfig config_from_centers(double R, double a, double eta, std::vector<Vec3> centers) {
    check_common(a, eta);
    if (!(R > 0.0)) throw ConfigError("container radius must be positive");
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (!(centers[i].norm() + a < R)) throw ConfigError("sphere not strictly inside the container");
        for (std::size_t j = 0; j < i; ++j)
            if (!((centers[i] - centers[j]).norm() > 2.0 * a)) throw OverlapError("spheres overlap");
    }
    SuspensionConfig cfg;
    cfg.R = R;
    cfg.a = a;
    cfg.eta = eta;
    cfg.centers = std::move(centers);
    return cfg;
}

std::vector<Vec3> nearest_neighbour_cross() {
    return {Vec3(-1, 0, 0), Vec3(0, -1, 0), Vec3(0, 0, -1), Vec3(0, 0, 0),
            Vec3(0, 0, 1),  Vec3(0, 1, 0),  Vec3(1, 0, 0)};
}

bool in_lambda(const Vec3& z, double R, double a, double d) { return z.norm() + 0.5 * d - a < R; }

std::vector<Vec3> lambda_set(double R, double a, double d) {
    std::vector<Vec3> out;
    const int k = static_cast<int>(std::ceil(R / d)) + 1;
    for (int i = -k; i <= k; ++i)
        for (int j = -k; j <= k; ++j)
            for (int l = -k; l <= k; ++l) {
                Vec3 z = d * Vec3(i, j, l);
                if (in_lambda(z, R, a, d)) out.push_back(z);
            }
    return out;
}

double volume_fraction(double a) { return 4.0 * kPi / 3.0 * a * a * a; }
double volume_fraction(const SuspensionConfig& cfg) { return volume_fraction(cfg.a); }

double container_fraction(const SuspensionConfig& cfg) {
    return static_cast<double>(cfg.N()) * std::pow(cfg.a / cfg.R, 3);
}

double container_volume(const SuspensionConfig& cfg) { return 4.0 * kPi / 3.0 * std::pow(cfg.R, 3); }

double fluid_volume(const SuspensionConfig& cfg) {
    return 4.0 * kPi / 3.0 * (std::pow(cfg.R, 3) - static_cast<double>(cfg.N()) * std::pow(cfg.a, 3));
}

bool in_fluid(const SuspensionConfig& cfg, const Vec3& x) {
    if (x.norm() > cfg.R) return false;
    for (const auto& c : cfg.centers)
        if ((x - c).norm() < cfg.a) return false;
    return true;
}

StrainRate make_strain(const Mat3& m) {
    const double scale = std::max(1.0, m.norm());
    if ((m - m.transpose()).norm() > 1e-12 * scale) throw DomainError("strain rate must be symmetric");
    if (std::abs(m.trace()) > 1e-12 * scale) throw DomainError("strain rate must be traceless");
    StrainRate s;
    s.eps = m;
    return s;
}

StrainRate strain_diag(double e1, double e2, double e3) {
    return make_strain(Vec3(e1, e2, e3).asDiagonal().toDenseMatrix());
}

SphereQuadrature sphere_quadrature_band(const Vec3& center, double radius, int band) {
    if (band < 0) throw DomainError("sphere quadrature band must be non-negative");
    if (!(radius > 0.0)) throw DomainError("sphere quadrature radius must be positive");
    SphereQuadrature q;
    q.center = center;
    q.radius = radius;
    q.band = band;
    q.order = 2 * band + 1;
    GaussRule g = gauss_legendre(band + 1);
    std::vector<std::size_t> idx(g.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return g.x[i] < g.x[j]; });
    const int nphi = 2 * (band + 1);
    const double dphi = 2.0 * kPi / nphi;
    q.nodes.reserve(idx.size() * nphi);
    for (std::size_t i : idx) {
        const double ct = g.x[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int k = 0; k < nphi; ++k) {
            const double phi = (k + 0.5) * dphi;
            Vec3 n(st * std::cos(phi), st * std::sin(phi), ct);
            q.normals.push_back(n);
            q.nodes.push_back(center + radius * n);
            q.weights.push_back(g.w[i] * dphi * radius * radius);
        }
    }
    return q;
}

SphereQuadrature sphere_quadrature(const Vec3& center, double radius, int order) {
    if (order < 0) throw DomainError("quadrature order must be non-negative");
    SphereQuadrature q = sphere_quadrature_band(center, radius, order / 2);
    return q;
}

double BallQuadrature::weight_sum() const {
    CompensatedSum s;
    for (double w : weights) s.add(w);
    return s.value();
}

namespace {

// 53-bit uniform double in [0, 1) from the raw generator output.
double unit_double(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

Vec3 unit_vector(std::mt19937_64& g) {
    const double z = 2.0 * unit_double(g) - 1.0;
    const double phi = 2.0 * kPi * unit_double(g);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(s * std::cos(phi), s * std::sin(phi), z);
}

}  // namespace

BallQuadrature ball_quadrature(const SuspensionConfig& cfg, double target_rel_err, std::uint64_t seed,
                               std::size_t max_nodes) {
    if (!(target_rel_err > 1e-6 && target_rel_err < 1e-1))
        throw DomainError("target relative error must lie in (1e-6, 1e-1)");
    const double R = cfg.R, a = cfg.a;
    const double rb = std::min(1.5 * a, 0.5);
    const bool has_shells = cfg.N() > 0 && rb > a;

    auto excluded_from_bulk = [&](const Vec3& x) {
        for (const auto& c : cfg.centers)
            if ((x - c).norm() < (has_shells ? rb : a)) return true;
        return false;
    };
    auto cell_may_cut = [&](const Vec3& mid, double diam) {
        for (const auto& c : cfg.centers)
            if ((mid - c).norm() < (has_shells ? rb : a) + diam) return true;
        return false;
    };

    for (int s = 6;; s = static_cast<int>(std::ceil(s * 1.5))) {
        std::mt19937_64 gen(seed);
        BallQuadrature q;
        q.seed = seed;
        q.target_rel_err = target_rel_err;
        double variance = 0.0;
        const int samples = 2;
        const int nr = s, nt = s, np = 2 * s;
        const double cell_vol = 4.0 * kPi / 3.0 * R * R * R / (nr * nt * np);
        for (int ir = 0; ir < nr; ++ir) {
            const double c0 = static_cast<double>(ir) / nr, c1 = static_cast<double>(ir + 1) / nr;
            for (int it = 0; it < nt; ++it) {
                const double z0 = -1.0 + 2.0 * it / nt, z1 = -1.0 + 2.0 * (it + 1) / nt;
                for (int ip = 0; ip < np; ++ip) {
                    const double p0 = 2.0 * kPi * ip / np, p1 = 2.0 * kPi * (ip + 1) / np;
                    const double rmid = R * std::cbrt(0.5 * (c0 + c1));
                    const double zmid = 0.5 * (z0 + z1), pmid = 0.5 * (p0 + p1);
                    const double smid = std::sqrt(std::max(0.0, 1.0 - zmid * zmid));
                    Vec3 mid(rmid * smid * std::cos(pmid), rmid * smid * std::sin(pmid), rmid * zmid);
                    const double diam = R * (std::cbrt(c1) - std::cbrt(c0)) + rmid * (2.0 / nt + 2.0 * kPi / np) * 2.0;
                    int accepted = 0;
                    for (int k = 0; k < samples; ++k) {
                        const double r = R * std::cbrt(c0 + (c1 - c0) * unit_double(gen));
                        const double z = z0 + (z1 - z0) * unit_double(gen);
                        const double phi = p0 + (p1 - p0) * unit_double(gen);
                        const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
                        Vec3 x(r * st * std::cos(phi), r * st * std::sin(phi), r * z);
                        if (excluded_from_bulk(x)) continue;
                        ++accepted;
                        q.nodes.push_back(x);
                        q.weights.push_back(cell_vol / samples);
                    }
                    if (cell_may_cut(mid, diam)) {
                        const double qt = (accepted + 0.5) / (samples + 1.0);
                        variance += cell_vol * cell_vol * qt * (1.0 - qt) / samples;
                    }
                }
            }
        }
        if (has_shells) {
            const double shell_vol = 4.0 * kPi / 3.0 * (rb * rb * rb - a * a * a);
            const int ns = 2 * s * s;
            for (const auto& c : cfg.centers) {
                int accepted = 0;
                for (int k = 0; k < ns; ++k) {
                    const double r = std::cbrt(a * a * a + (rb * rb * rb - a * a * a) * unit_double(gen));
                    Vec3 x = c + r * unit_vector(gen);
                    if (x.norm() >= R) continue;
                    ++accepted;
                    q.nodes.push_back(x);
                    q.weights.push_back(shell_vol / ns);
                }
                if (accepted < ns) {
                    const double qt = (accepted + 0.5) / (ns + 1.0);
                    variance += shell_vol * shell_vol * qt * (1.0 - qt) / ns;
                }
            }
        }
        const double total = q.weight_sum();
        q.rel_err_estimate = total > 0.0 ? std::sqrt(variance) / total : 1.0;
        if (q.size() > max_nodes) throw BudgetError("ball quadrature node budget exceeded before error target");
        if (q.rel_err_estimate <= target_rel_err) return q;
    }
}

double smooth_bump(double r, double inner, double outer) {
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    const double t = (outer - r) / (outer - inner);
    auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double ft = f(t), fu = f(1.0 - t);
    return ft / (ft + fu);
}

}  // namespace sev
