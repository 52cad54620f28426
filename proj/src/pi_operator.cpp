#include "stokes_ev/harmonic_analysis.hpp"

#include <cmath>
#include <numbers>

namespace sev {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 pressure_kernel(const Vec3& x) {
    const double r = x.norm();
    return x / (4.0 * kPi * r * r * r);
}

// Analysis matrix (P x n): node values -> real harmonic coefficients.
Eigen::MatrixXd analysis_matrix(const SphereQuadrature& q, int nmax) {
    const int P = sh_count(nmax);
    Eigen::MatrixXd A(P, static_cast<Eigen::Index>(q.size()));
    Eigen::VectorXd y(P);
    const double r2 = q.radius * q.radius;
    for (std::size_t j = 0; j < q.size(); ++j) {
        real_sh(nmax, q.normals[j], y.data());
        A.col(static_cast<Eigen::Index>(j)) = y * (q.weights[j] / r2);
    }
    return A;
}

}  // namespace

Eigen::MatrixXd pi_operator_matrix(const SphereQuadrature& q, int nmax) {
    if (nmax < 0) nmax = q.band;
    if (nmax > q.band) throw AliasError("requested degree exceeds what the quadrature resolves");
    const int P = sh_count(nmax);
    const auto n = static_cast<Eigen::Index>(q.size());
    const Eigen::MatrixXd A = analysis_matrix(q, nmax);
    const int mt = nmax + 9;
    const int mp = 2 * nmax + 10;

    // rows(i, a*P + k): action on coefficient k of component a, on the unit sphere
    // (the operator is dilation invariant).
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(n, 3 * P);
    parallel_for(q.size(), [&](std::size_t b, std::size_t e) {
        Eigen::VectorXd y(P);
        for (std::size_t i = b; i < e; ++i) {
            const Vec3& xi = q.normals[i];
            const RotatedGrid g = rotated_grid(xi, mt, mp);
            for (std::size_t k = 0; k < g.dirs.size(); ++k) {
                const Vec3 K = pressure_kernel(xi - g.dirs[k]) * g.weights[k];
                real_sh(nmax, g.dirs[k], y.data());
                for (int a = 0; a < 3; ++a) rows.row(static_cast<Eigen::Index>(i)).segment(a * P, P) += K[a] * y.transpose();
            }
        }
    });

    Eigen::MatrixXd M(n, 3 * n);
    for (int a = 0; a < 3; ++a) {
        const Eigen::MatrixXd blk = rows.middleCols(a * P, P) * A;
        for (Eigen::Index j = 0; j < n; ++j) M.col(3 * j + a) = blk.col(j);
    }
    return M;
}

std::vector<double> pi_apply(const SphereQuadrature& q, const std::vector<Vec3>& tractions, int nmax) {
    if (tractions.size() != q.size()) throw DomainError("traction count does not match the quadrature");
    const Eigen::MatrixXd M = pi_operator_matrix(q, nmax);
    Eigen::VectorXd t(3 * static_cast<Eigen::Index>(q.size()));
    for (std::size_t j = 0; j < q.size(); ++j) t.segment<3>(3 * static_cast<Eigen::Index>(j)) = tractions[j];
    const Eigen::VectorXd out = M * t;
    return {out.data(), out.data() + out.size()};
}

double pi_norm_estimate(double radius, int nmax) {
    if (!(radius > 0.0)) throw DomainError("radius must be positive");
    if (nmax < 1) throw DomainError("band must be at least 1");
    const SphereQuadrature q = sphere_quadrature_band(Vec3::Zero(), radius, nmax);
    Eigen::MatrixXd M = pi_operator_matrix(q, nmax);
    for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) *= std::sqrt(q.weights[i]);
    for (Eigen::Index j = 0; j < M.rows(); ++j)
        for (int a = 0; a < 3; ++a) M.col(3 * j + a) /= std::sqrt(q.weights[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

PiNormSequence pi_norm_sequence(double radius, const std::vector<int>& orders) {
    PiNormSequence s;
    for (int o : orders) {
        s.orders.push_back(o);
        s.estimates.push_back(pi_norm_estimate(radius, o));
        const std::size_t k = s.estimates.size();
        if (k >= 2 && std::abs(s.estimates[k - 1] - s.estimates[k - 2]) > 0.02)
            throw ConvergenceError("operator norm estimates differ by more than 0.02 between orders");
    }
    return s;
}

std::array<double, 2> pi_degree_multipliers(int n) {
    if (n < 0) throw DomainError("degree must be non-negative");
    const double den = 2.0 * n + 1.0;
    return {-0.5 / den, std::sqrt(n * (n + 1.0)) / den};
}

std::array<std::complex<double>, 2> flat_symbol(const Eigen::Vector2d& nu, double L) {
    const double nn = nu.norm();
    if (!(nn > 0.0)) throw DomainError("frequency must be non-zero");
    if (L <= 0.0) L = 120.0 / nn;
    const double k = 2.0 * kPi * nn;
    int M = static_cast<int>(std::ceil(1.2 * k * L)) + 64;
    M += M % 2;
    const double width = 0.25 / nn;
    const int panels = static_cast<int>(std::ceil(L / width));
    const GaussRule g = gauss_legendre(8);

    std::vector<double> ct(M), st(M);
    for (int m = 0; m < M; ++m) {
        ct[m] = std::cos(2.0 * kPi * m / M);
        st[m] = std::sin(2.0 * kPi * m / M);
    }
    // In polar coordinates the integrand is exp(-2 pi i r w.nu) w / (4 pi r) dr dtheta.
    std::complex<double> s1 = 0.0, s2 = 0.0;
    const double h = L / panels;
    for (int p = 0; p < panels; ++p) {
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double r = p * h + 0.5 * h * (g.x[j] + 1.0);
            const double wr = 0.5 * h * g.w[j] / (4.0 * kPi * r) * (2.0 * kPi / M);
            std::complex<double> a1 = 0.0, a2 = 0.0;
            for (int m = 0; m < M; ++m) {
                const std::complex<double> e = std::polar(1.0, -2.0 * kPi * r * (ct[m] * nu[0] + st[m] * nu[1]));
                a1 += e * ct[m];
                a2 += e * st[m];
            }
            s1 += wr * a1;
            s2 += wr * a2;
        }
    }
    return {s1, s2};
}

DivergenceIdentityResult divergence_identity_check(
    const std::function<void(const Vec3&, Vec3&, Mat3&)>& field, const SuspensionConfig& cfg, int order,
    const std::vector<Vec3>& points, double div_coefficient, double h) {
    struct Surface {
        SphereQuadrature q;
        double sign;  // +1 container (normal x/R), -1 sphere (normal towards the centre)
        std::vector<Vec3> normal, u, dudn;
    };
    std::vector<Surface> surfaces;
    auto add = [&](const Vec3& c, double radius, double sign) {
        Surface s{sphere_quadrature(c, radius, order), sign, {}, {}, {}};
        for (std::size_t i = 0; i < s.q.size(); ++i) {
            const Vec3 n = sign * s.q.normals[i];
            Vec3 u;
            Mat3 grad;
            field(s.q.nodes[i], u, grad);
            s.normal.push_back(n);
            s.u.push_back(u);
            s.dudn.push_back(grad * n);
        }
        surfaces.push_back(std::move(s));
    };
    add(Vec3::Zero(), cfg.R, 1.0);
    for (const auto& c : cfg.centers) add(c, cfg.a, -1.0);

    auto F = [&](const Vec3& xi) {
        Vec3 out = Vec3::Zero();
        for (const auto& s : surfaces)
            for (std::size_t i = 0; i < s.q.size(); ++i)
                out += s.normal[i] * (pressure_kernel(xi - s.q.nodes[i]).dot(s.u[i]) * s.q.weights[i]);
        return out;
    };

    DivergenceIdentityResult res;
    res.points = points;
    double num = 0.0, den = 0.0;
    for (const Vec3& xi : points) {
        double div = 0.0;
        for (int a = 0; a < 3; ++a) {
            Vec3 e = Vec3::Zero();
            e[a] = h;
            div += (F(xi + e)[a] - F(xi - e)[a]) / (2.0 * h);
        }
        double rhs = 0.0;
        for (const auto& s : surfaces) {
            const double curvature = div_coefficient / s.q.radius;
            double pi_u = 0.0, pi_dn = 0.0;
            for (std::size_t i = 0; i < s.q.size(); ++i) {
                const Vec3 K = pressure_kernel(xi - s.q.nodes[i]) * s.q.weights[i];
                pi_u += K.dot(s.u[i]);
                pi_dn += K.dot(s.dudn[i]);
            }
            rhs += s.sign * curvature * pi_u + pi_dn;
        }
        res.lhs.push_back(div);
        res.rhs.push_back(rhs);
        num = std::max(num, std::abs(div - rhs));
        den = std::max(den, std::abs(rhs));
    }
    res.residual = den > 0.0 ? num / den : num;
    return res;
}

}  // namespace sev
