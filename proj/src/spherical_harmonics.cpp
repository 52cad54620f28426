#include "stokes_ev/spherical_harmonics.hpp"

#include <gsl/gsl_sf_legendre.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sev {

namespace {

// Normalized associated Legendre values S_n^m(x) for 0 <= m <= n <= nmax.
const std::vector<double>& legendre_table(int nmax, double x, double csphase) {
    thread_local std::vector<double> buf;
    buf.resize(gsl_sf_legendre_array_n(static_cast<size_t>(nmax)));
    gsl_sf_legendre_array_e(GSL_SF_LEGENDRE_SPHARM, static_cast<size_t>(nmax), x, csphase, buf.data());
    return buf;
}

void angles(const Vec3& dir, double& ct, double& phi) {
    const double r = dir.norm();
    ct = std::clamp(dir.z() / r, -1.0, 1.0);
    phi = std::atan2(dir.y(), dir.x());
}

}  // namespace

void real_sh(int nmax, const Vec3& dir, double* out) {
    double ct, phi;
    angles(dir, ct, phi);
    const auto& P = legendre_table(nmax, ct, 1.0);
    const double s2 = std::numbers::sqrt2;
    for (int m = 0; m <= nmax; ++m) {
        const double cm = std::cos(m * phi), sm = std::sin(m * phi);
        for (int n = m; n <= nmax; ++n) {
            const double v = P[gsl_sf_legendre_array_index(n, m)];
            if (m == 0) {
                out[sh_index(n, 0)] = v;
            } else {
                out[sh_index(n, m)] = s2 * v * cm;
                out[sh_index(n, -m)] = s2 * v * sm;
            }
        }
    }
}

Eigen::VectorXd real_sh(int nmax, const Vec3& dir) {
    Eigen::VectorXd v(sh_count(nmax));
    real_sh(nmax, dir, v.data());
    return v;
}

void complex_sh(int nmax, const Vec3& dir, std::complex<double>* out) {
    double ct, phi;
    angles(dir, ct, phi);
    const auto& P = legendre_table(nmax, ct, -1.0);
    for (int m = 0; m <= nmax; ++m) {
        const std::complex<double> e = std::polar(1.0, m * phi);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (int n = m; n <= nmax; ++n) {
            const std::complex<double> y = P[gsl_sf_legendre_array_index(n, m)] * e;
            out[sh_index(n, m)] = y;
            if (m > 0) out[sh_index(n, -m)] = sign * std::conj(y);
        }
    }
}

Eigen::MatrixXd real_sh_matrix(int nmax, const std::vector<Vec3>& dirs) {
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(dirs.size()), sh_count(nmax));
    Eigen::VectorXd row(sh_count(nmax));
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        real_sh(nmax, dirs[i], row.data());
        Y.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return Y;
}

RotatedGrid rotated_grid(const Vec3& pole, int ntheta, int nphi) {
    Vec3 t1, t2;
    tangent_frame(pole, t1, t2);
    const GaussRule g = gauss_legendre(ntheta, 0.0, std::numbers::pi);
    RotatedGrid out;
    out.dirs.reserve(static_cast<std::size_t>(ntheta) * nphi);
    out.weights.reserve(out.dirs.capacity());
    const double dphi = 2.0 * std::numbers::pi / nphi;
    for (int i = 0; i < ntheta; ++i) {
        const double st = std::sin(g.x[i]), ct = std::cos(g.x[i]);
        for (int k = 0; k < nphi; ++k) {
            const double phi = k * dphi;
            out.dirs.push_back(st * std::cos(phi) * t1 + st * std::sin(phi) * t2 + ct * pole);
            out.weights.push_back(g.w[i] * st * dphi);
        }
    }
    return out;
}

}  // namespace sev
