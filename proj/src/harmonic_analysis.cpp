#include "stokes_ev/harmonic_analysis.hpp"

#include <cmath>
#include <numbers>

namespace sev {

namespace {
constexpr double kPi = std::numbers::pi;
}

SphericalFunction make_spherical_function(double radius, int nmax) {
    SphericalFunction f;
    f.radius = radius;
    f.nmax = nmax;
    f.G.assign(static_cast<std::size_t>(sh_count(nmax)), {0.0, 0.0});
    return f;
}

SphericalFunction analyze(const SphereQuadrature& q, const std::vector<double>& samples, int nmax) {
    if (nmax > q.band) throw AliasError("requested degree exceeds what the quadrature resolves");
    if (samples.size() != q.size()) throw DomainError("sample count does not match the quadrature");
    SphericalFunction f = make_spherical_function(q.radius, nmax);
    std::vector<std::complex<double>> Y(static_cast<std::size_t>(sh_count(nmax)));
    const double r2 = q.radius * q.radius;
    for (std::size_t i = 0; i < q.size(); ++i) {
        complex_sh(nmax, q.normals[i], Y.data());
        const double w = q.weights[i] / r2 * samples[i];
        for (std::size_t j = 0; j < Y.size(); ++j) f.G[j] += w * std::conj(Y[j]);
    }
    return f;
}

std::vector<double> synthesize(const SphericalFunction& f, const std::vector<Vec3>& points) {
    std::vector<double> out(points.size());
    std::vector<std::complex<double>> Y(f.G.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        complex_sh(f.nmax, points[i], Y.data());
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < Y.size(); ++j) s += f.G[j] * Y[j];
        out[i] = s.real();
    }
    return out;
}

double boundary_l2_norm_sq(const SphericalFunction& f) {
    double s = 0.0;
    for (const auto& g : f.G) s += std::norm(g);
    return s * f.radius * f.radius;
}

double boundary_h_half_seminorm_sq(const SphericalFunction& f) {
    double s = 0.0;
    for (int n = 0; n <= f.nmax; ++n)
        for (int k = -n; k <= n; ++k) s += std::norm(f.at(n, k)) * std::sqrt(n * (n + 1.0));
    return s * f.radius;
}

double boundary_h_minus_half_seminorm_sq(const SphericalFunction& f) {
    double s = 0.0;
    for (int n = 1; n <= f.nmax; ++n)
        for (int k = -n; k <= n; ++k) s += std::norm(f.at(n, k)) / std::sqrt(n * (n + 1.0));
    return s * std::pow(f.radius, 3);
}

double InteriorExtension::value(const Vec3& x) const {
    const double r = x.norm();
    if (r == 0.0) return (f_.at(0, 0) / std::sqrt(4.0 * kPi)).real();
    std::vector<std::complex<double>> Y(f_.G.size());
    complex_sh(f_.nmax, x, Y.data());
    std::complex<double> s = 0.0;
    for (int n = 0; n <= f_.nmax; ++n) {
        const double scale = std::pow(r / f_.radius, n);
        for (int k = -n; k <= n; ++k) s += scale * f_.at(n, k) * Y[sh_index(n, k)];
    }
    return s.real();
}

double InteriorExtension::l2_norm_sq() const {
    double s = 0.0;
    for (int n = 0; n <= f_.nmax; ++n)
        for (int k = -n; k <= n; ++k) s += std::norm(f_.at(n, k)) / (3.0 + 2.0 * n);
    return s * std::pow(f_.radius, 3);
}

double InteriorExtension::grad_norm_sq() const {
    double s = 0.0;
    for (int n = 0; n <= f_.nmax; ++n)
        for (int k = -n; k <= n; ++k) s += n * std::norm(f_.at(n, k));
    return s * f_.radius;
}

double InteriorExtension::h_half_proxy() const { return std::sqrt(std::sqrt(l2_norm_sq()) * std::sqrt(h1_norm_sq())); }

InteriorExtension harmonic_extension_interior(const SphericalFunction& p) { return InteriorExtension(p); }

double ExteriorExtension::value(const Vec3& x) const {
    const double r = x.norm();
    std::vector<std::complex<double>> Y(f_.G.size());
    complex_sh(f_.nmax, x, Y.data());
    std::complex<double> s = 0.0;
    for (int n = 0; n <= f_.nmax; ++n) {
        const double scale = std::pow(f_.radius / r, n + 1);
        for (int k = -n; k <= n; ++k) s += scale * f_.at(n, k) * Y[sh_index(n, k)];
    }
    return s.real();
}

double ExteriorExtension::l2_norm_sq() const {
    // int_a^d (a/r)^(2n+2) r^2 dr
    const double a = f_.radius, d = d_;
    double s = 0.0;
    for (int n = 0; n <= f_.nmax; ++n) {
        const double radial = n == 0 ? a * a * (d - a)
                                     : std::pow(a, 2 * n + 2) * (std::pow(a, 1 - 2 * n) - std::pow(d, 1 - 2 * n)) /
                                           (2.0 * n - 1.0);
        for (int k = -n; k <= n; ++k) s += std::norm(f_.at(n, k)) * radial;
    }
    return s;
}

double ExteriorExtension::grad_norm_sq() const {
    const double a = f_.radius;
    double s = 0.0;
    for (int n = 0; n <= f_.nmax; ++n) {
        const double radial = (n + 1.0) * a * (1.0 - std::pow(a / d_, 2 * n + 1));
        for (int k = -n; k <= n; ++k) s += std::norm(f_.at(n, k)) * radial;
    }
    return s;
}

double ExteriorExtension::h_half_proxy() const {
    return std::sqrt(std::sqrt(l2_norm_sq()) * std::sqrt(l2_norm_sq() + grad_norm_sq()));
}

double ExteriorExtension::bound() const {
    return exterior_h_half_constant(f_.radius, d_) * std::sqrt(boundary_l2_norm_sq(f_));
}

ExteriorExtension extension_exterior(const SphericalFunction& p, double d) {
    if (!(d > p.radius)) throw DomainError("exterior extension needs d > a");
    return ExteriorExtension(p, d);
}

double interior_l2_constant(double R) { return std::sqrt(R / 3.0); }
double interior_h_half_constant(double R) { return std::pow(0.5, 0.25) * std::pow(1.0 + R / 3.0, 0.25); }
double exterior_h_half_constant(double a, double d) {
    return std::pow(2.0, 0.125) * std::pow(d + 1.0 / a + std::numbers::sqrt2, 0.25);
}

namespace {

double bump(double s) { return s >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - s * s)); }
double dbump(double s) {
    if (s >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return -bump(s) * 2.0 * s / (q * q);
}

}  // namespace

double CutoffPair::zeta_e(double r) const { return r < a ? 1.0 : bump((r - a) / (d - a)); }
double CutoffPair::dzeta_e(double r) const { return r < a ? 0.0 : dbump((r - a) / (d - a)) / (d - a); }
double CutoffPair::zeta_i(double r) const { return r > R ? 1.0 : (r < d ? 0.0 : bump((R - r) / (R - d))); }
double CutoffPair::dzeta_i(double r) const {
    return (r > R || r < d) ? 0.0 : -dbump((R - r) / (R - d)) / (R - d);
}

double cutoff_slope_constant() {
    // Maximize -dbump on (0,1) by golden-section search; the function is unimodal there.
    double lo = 0.05, hi = 0.99;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
        const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
        if (-dbump(m1) < -dbump(m2))
            lo = m1;
        else
            hi = m2;
    }
    return -dbump(0.5 * (lo + hi));
}

}  // namespace sev
