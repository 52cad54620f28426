#include "stokes_ev/lamb.hpp"

#include "stokes_ev/geometry.hpp"
#include "stokes_ev/spherical_harmonics.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace sev {

Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.g, s * a.h}; }
Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v * b.v;
    r.g = a.v * b.g + b.v * a.g;
    r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}

namespace {

Jet coordinate(const Vec3& x, int i) {
    Jet j;
    j.v = x[i];
    j.g[i] = 1.0;
    return j;
}

// f(s) applied to a jet s, given f(s.v), f', f''.
Jet compose(const Jet& s, double f, double df, double d2f) {
    return {f, df * s.g, df * s.h + d2f * s.g * s.g.transpose()};
}

}  // namespace

void solid_harmonics_direct(int L, const Vec3& x, bool irregular, std::vector<Jet>& out) {
    const int P = sh_count(L);
    out.assign(static_cast<std::size_t>(P), Jet{});
    const Jet X = coordinate(x, 0), Y = coordinate(x, 1), Z = coordinate(x, 2);
    const Jet r2 = X * X + Y * Y + Z * Z;

    // Complex S_n^m = r^n P_n^m(cos theta) e^{i m phi} (no Condon-Shortley phase),
    // as real and imaginary jets, by the standard three-term recurrences.
    const auto tri = static_cast<std::size_t>((L + 1) * (L + 2) / 2);
    std::vector<Jet> re(tri), im(tri);
    auto at = [](int n, int m) { return static_cast<std::size_t>(n * (n + 1) / 2 + m); };
    re[at(0, 0)].v = 1.0;
    for (int m = 1; m <= L; ++m) {
        const Jet& a = re[at(m - 1, m - 1)];
        const Jet& b = im[at(m - 1, m - 1)];
        const double c = 2.0 * m - 1.0;
        re[at(m, m)] = c * (X * a - Y * b);
        im[at(m, m)] = c * (X * b + Y * a);
    }
    for (int m = 0; m < L; ++m) {
        re[at(m + 1, m)] = (2.0 * m + 1.0) * (Z * re[at(m, m)]);
        im[at(m + 1, m)] = (2.0 * m + 1.0) * (Z * im[at(m, m)]);
        for (int n = m + 2; n <= L; ++n) {
            const double inv = 1.0 / (n - m);
            re[at(n, m)] = inv * ((2.0 * n - 1.0) * (Z * re[at(n - 1, m)]) - (n + m - 1.0) * (r2 * re[at(n - 2, m)]));
            im[at(n, m)] = inv * ((2.0 * n - 1.0) * (Z * im[at(n - 1, m)]) - (n + m - 1.0) * (r2 * im[at(n - 2, m)]));
        }
    }

    for (int n = 0; n <= L; ++n) {
        Jet kelvin;
        if (irregular) {
            const double s = r2.v, e = n + 0.5;
            kelvin = compose(r2, std::pow(s, -e), -e * std::pow(s, -e - 1.0), e * (e + 1.0) * std::pow(s, -e - 2.0));
        }
        double ratio = 1.0;  // (n-m)!/(n+m)!
        for (int m = 0; m <= n; ++m) {
            if (m > 0) ratio /= static_cast<double>((n + m) * (n - m + 1));
            const double N = std::sqrt(ratio) * (m == 0 ? 1.0 : std::sqrt(2.0));
            Jet c = N * re[at(n, m)];
            Jet s = N * im[at(n, m)];
            if (irregular) {
                c = c * kelvin;
                s = s * kelvin;
            }
            out[static_cast<std::size_t>(sh_index(n, m))] = c;
            if (m > 0) out[static_cast<std::size_t>(sh_index(n, -m))] = s;
        }
    }
}

namespace {

using cplx = std::complex<double>;
constexpr int kMaxDegree = 64;

// Complex solid harmonics without the Condon-Shortley phase, scaled so that
// derivatives act as ladders between neighbouring degrees:
//   regular    R_n^m = r^n P_n^m e^{im phi} / (n+m)!
//   irregular  I_n^m = (n-m)! r^{-n-1} P_n^m e^{im phi}
// Both extend to m < 0 by T_n^{-m} = (-1)^m conj(T_n^m). With d+ = dx + i dy
// and d- = dx - i dy:
//   R: dz R_n^m = R_{n-1}^m,  d+ R_n^m = -R_{n-1}^{m+1},  d- R_n^m = R_{n-1}^{m-1}
//   I: dz I_n^m = -I_{n+1}^m, d+ I_n^m = -I_{n+1}^{m+1}, d- I_n^m = I_{n+1}^{m-1}
struct Ladder {
    int L = 0;
    bool irregular = false;
    std::vector<cplx> t;

    static std::size_t at(int n, int m) { return static_cast<std::size_t>(n * (n + 1) / 2 + m); }

    void build(int degree, const Vec3& x, bool irr) {
        L = degree;
        irregular = irr;
        t.assign(at(L + 1, 0), cplx(0.0, 0.0));
        const cplx w(x[0], x[1]);
        const double z = x[2], r2 = x.squaredNorm();
        if (!irr) {
            t[0] = 1.0;
            for (int m = 1; m <= L; ++m) t[at(m, m)] = w * t[at(m - 1, m - 1)] / (2.0 * m);
            for (int m = 0; m < L; ++m) {
                t[at(m + 1, m)] = z * t[at(m, m)];
                for (int n = m + 2; n <= L; ++n)
                    t[at(n, m)] = ((2.0 * n - 1.0) * z * t[at(n - 1, m)] - r2 * t[at(n - 2, m)]) /
                                  static_cast<double>((n - m) * (n + m));
            }
        } else {
            const double ir2 = 1.0 / r2;
            t[0] = std::sqrt(ir2);
            for (int m = 1; m <= L; ++m) t[at(m, m)] = (2.0 * m - 1.0) * ir2 * w * t[at(m - 1, m - 1)];
            for (int m = 0; m < L; ++m) {
                t[at(m + 1, m)] = (2.0 * m + 1.0) * ir2 * z * t[at(m, m)];
                for (int n = m + 2; n <= L; ++n)
                    t[at(n, m)] = ir2 * ((2.0 * n - 1.0) * z * t[at(n - 1, m)] -
                                         static_cast<double>((n + m - 1) * (n - m - 1)) * t[at(n - 2, m)]);
            }
        }
    }

    cplx get(int n, int m) const {
        const int am = std::abs(m);
        if (n < 0 || n > L || am > n) return 0.0;
        const cplx v = t[at(n, am)];
        return m >= 0 ? v : ((am % 2) ? -std::conj(v) : std::conj(v));
    }
};

// Factor turning Re/Im of the ladder normalization into the real harmonics
// normalized by sqrt((n-m)!/(n+m)!) (times sqrt2 for m > 0).
double real_factor(int n, int m, bool irregular) {
    static const auto table = [] {
        std::vector<double> f(2 * Ladder::at(kMaxDegree + 1, 0));
        for (int n = 0; n <= kMaxDegree; ++n)
            for (int m = 0; m <= n; ++m) {
                const double lg = 0.5 * (std::lgamma(n - m + 1.0) + std::lgamma(n + m + 1.0));
                const double s = m > 0 ? std::sqrt(2.0) : 1.0;
                f[2 * Ladder::at(n, m)] = s * std::exp(lg);
                f[2 * Ladder::at(n, m) + 1] = s * std::exp(-lg);
            }
        return f;
    }();
    return table[2 * Ladder::at(n, m) + (irregular ? 1 : 0)];
}

void ladder_jets(int L, const Vec3& x, bool irregular, std::vector<Jet>& out) {
    if (L > kMaxDegree - 2) throw DomainError("solid harmonic degree too large");
    thread_local Ladder lad;
    lad.build(L + (irregular ? 2 : 0), x, irregular);
    out.resize(static_cast<std::size_t>(sh_count(L)));
    const int dn = irregular ? 1 : -1;
    const double sz = irregular ? -1.0 : 1.0;
    const cplx two_i(0.0, 2.0), four_i(0.0, 4.0);
    for (int n = 0; n <= L; ++n)
        for (int m = 0; m <= n; ++m) {
            const cplx v = lad.get(n, m);
            const cplx dp = -lad.get(n + dn, m + 1), dm = lad.get(n + dn, m - 1), dz = sz * lad.get(n + dn, m);
            const cplx gx = 0.5 * (dp + dm), gy = (dp - dm) / two_i;
            const int n2 = n + 2 * dn;
            const cplx pp = lad.get(n2, m + 2), pm = -lad.get(n2, m), mm = lad.get(n2, m - 2);
            const cplx zz = lad.get(n2, m), zp = -sz * lad.get(n2, m + 1), zm = sz * lad.get(n2, m - 1);
            const cplx hxx = 0.25 * (pp + 2.0 * pm + mm), hyy = -0.25 * (pp - 2.0 * pm + mm);
            const cplx hxy = (pp - mm) / four_i, hzx = 0.5 * (zp + zm), hzy = (zp - zm) / two_i;
            const double F = real_factor(n, m, irregular);
            for (int part = 0; part < (m > 0 ? 2 : 1); ++part) {
                auto R = [&](const cplx& c) { return F * (part ? c.imag() : c.real()); };
                Jet& j = out[static_cast<std::size_t>(sh_index(n, part ? -m : m))];
                j.v = R(v);
                j.g = Vec3(R(gx), R(gy), R(dz));
                j.h << R(hxx), R(hxy), R(hzx), R(hxy), R(hyy), R(hzy), R(hzx), R(hzy), R(zz);
            }
        }
}

}  // namespace

void solid_harmonics(int L, const Vec3& x, bool irregular, std::vector<Jet>& out) {
    ladder_jets(L, x, irregular, out);
}

LambSeries::LambSeries(Kind kind, const Vec3& center, double scale, int degree, double eta)
    : kind_(kind), center_(center), scale_(scale), degree_(degree), eta_(eta) {
    if (!(scale > 0.0)) throw DomainError("Lamb series scale must be positive");
    if (degree < 1) throw DomainError("Lamb series degree must be at least 1");
    if (kind_ == Kind::Exterior) terms_.push_back({1, 0, 0});  // point source
    for (int n = 1; n <= degree; ++n)
        for (int m = -n; m <= n; ++m)
            for (int f = 0; f < 3; ++f) terms_.push_back({f, n, m});
    coeffs_ = Eigen::VectorXd::Zero(basis_size());
}

namespace {

struct TermValue {
    Vec3 u;
    Mat3 grad;
    double p;
};

TermValue term_value(int family, int k, const Jet& h, const Vec3& x) {
    TermValue t{Vec3::Zero(), Mat3::Zero(), 0.0};
    switch (family) {
        case 0: {
            const double den = 2.0 * (k + 1.0) * (2.0 * k + 3.0);
            const double alpha = (k + 3.0) / den, beta = 2.0 * k / den;
            const double r2 = x.squaredNorm();
            t.u = alpha * r2 * h.g - beta * h.v * x;
            t.grad = alpha * (2.0 * h.g * x.transpose() + r2 * h.h) -
                     beta * (h.v * Mat3::Identity() + x * h.g.transpose());
            t.p = h.v;
            break;
        }
        case 1:
            t.u = h.g;
            t.grad = h.h;
            break;
        default:
            t.u = h.g.cross(x);
            for (int j = 0; j < 3; ++j) t.grad.col(j) = Vec3(h.h.col(j)).cross(x) + h.g.cross(Vec3::Unit(j));
            break;
    }
    return t;
}

}  // namespace

FieldSample LambSeries::evaluate(const Vec3& x) const {
    const Vec3 y = (x - center_) / scale_;
    thread_local std::vector<Jet> H;
    solid_harmonics(degree_, y, kind_ == Kind::Exterior, H);
    // Combined potentials: pressure family u = r^2 grad A - B y with p = P,
    // potential family grad Phi, toroidal family grad X x y.
    Jet A, B, Phi, X;
    double P = 0.0;
    auto axpy = [](Jet& acc, double c, const Jet& h) {
        acc.v += c * h.v;
        acc.g += c * h.g;
        acc.h += c * h.h;
    };
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const double c = coeffs_[static_cast<Eigen::Index>(i)];
        if (c == 0.0) continue;
        const Term& t = terms_[i];
        const Jet& h = H[static_cast<std::size_t>(sh_index(t.n, t.m))];
        switch (t.family) {
            case 0: {
                const double k = k_of(t.n);
                const double den = 2.0 * (k + 1.0) * (2.0 * k + 3.0);
                axpy(A, c * (k + 3.0) / den, h);
                axpy(B, c * 2.0 * k / den, h);
                P += c * h.v;
                break;
            }
            case 1:
                axpy(Phi, c, h);
                break;
            default:
                axpy(X, c, h);
                break;
        }
    }
    const double r2 = y.squaredNorm();
    const Vec3 u = r2 * A.g - B.v * y + Phi.g + X.g.cross(y);
    Mat3 grad = 2.0 * A.g * y.transpose() + r2 * A.h - B.v * Mat3::Identity() - y * B.g.transpose() + Phi.h;
    for (int j = 0; j < 3; ++j) grad.col(j) += Vec3(X.h.col(j)).cross(y) + X.g.cross(Vec3::Unit(j));
    return make_sample(u, eta_ * P / scale_ + pressure_offset_, grad / scale_, eta_);
}

Eigen::MatrixXd LambSeries::basis_velocity(const Vec3& x) const {
    const Vec3 y = (x - center_) / scale_;
    std::vector<Jet> H;
    solid_harmonics(degree_, y, kind_ == Kind::Exterior, H);
    Eigen::MatrixXd B(3, basis_size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const Term& t = terms_[i];
        B.col(static_cast<Eigen::Index>(i)) =
            term_value(t.family, k_of(t.n), H[static_cast<std::size_t>(sh_index(t.n, t.m))], y).u;
    }
    return B;
}

namespace {

// Weighted least-squares solver for one (kind, degree, radius) combination,
// shared between series because the basis only depends on scaled coordinates.
struct FitOperator {
    SphereQuadrature grid;
    Eigen::MatrixXd pinv;  // basis_size x 3 nodes, weights folded in
};

std::shared_ptr<const FitOperator> fit_operator(const LambSeries& proto, double radius_factor) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double>, std::shared_ptr<const FitOperator>> cache;
    const auto key = std::make_tuple(static_cast<int>(proto.kind()), proto.degree(), radius_factor);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    LambSeries unit(proto.kind(), Vec3::Zero(), 1.0, proto.degree(), 1.0);
    auto op = std::make_shared<FitOperator>();
    op->grid = sphere_quadrature_band(Vec3::Zero(), radius_factor, proto.degree() + 3);
    const auto n = static_cast<Eigen::Index>(op->grid.size());
    Eigen::MatrixXd A(3 * n, unit.basis_size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sw = std::sqrt(op->grid.weights[static_cast<std::size_t>(i)]);
        A.middleRows(3 * i, 3) = sw * unit.basis_velocity(op->grid.nodes[static_cast<std::size_t>(i)]);
    }
    // On the sampling sphere every basis field is a combination of the vector
    // harmonics of its own (n, m), and the rule integrates the products exactly,
    // so the normal matrix is block diagonal with one block per (n, m).
    const auto& terms = unit.terms();
    op->pinv = Eigen::MatrixXd::Zero(unit.basis_size(), 3 * n);
    std::size_t i = 0;
    while (i < terms.size()) {
        std::size_t j = i;
        while (j < terms.size() && terms[j].n == terms[i].n && terms[j].m == terms[i].m) ++j;
        const auto b = static_cast<Eigen::Index>(i), len = static_cast<Eigen::Index>(j - i);
        const Eigen::MatrixXd cols = A.middleCols(b, len);
        const Eigen::MatrixXd G = cols.transpose() * cols;
        op->pinv.middleRows(b, len) = G.ldlt().solve(cols.transpose());
        i = j;
    }
    for (Eigen::Index k = 0; k < n; ++k)
        op->pinv.middleCols(3 * k, 3) *= std::sqrt(op->grid.weights[static_cast<std::size_t>(k)]);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, op);
    return op;
}

}  // namespace

void LambSeries::fit(const std::function<Vec3(const Vec3&)>& velocity, double radius_factor) {
    const std::vector<Vec3> pts = fit_points(radius_factor);
    std::vector<Vec3> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = velocity(pts[i]);
    fit_values(vals, radius_factor);
}

std::vector<Vec3> LambSeries::fit_points(double radius_factor) const {
    const auto op = fit_operator(*this, radius_factor);
    std::vector<Vec3> pts(op->grid.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = center_ + scale_ * op->grid.nodes[i];
    return pts;
}

void LambSeries::fit_values(const std::vector<Vec3>& values, double radius_factor) {
    const auto op = fit_operator(*this, radius_factor);
    const auto n = static_cast<Eigen::Index>(op->grid.size());
    if (static_cast<Eigen::Index>(values.size()) != n) throw DomainError("fit sample count mismatch");
    Eigen::VectorXd b(3 * n);
    for (Eigen::Index i = 0; i < n; ++i) b.segment<3>(3 * i) = values[static_cast<std::size_t>(i)];
    coeffs_ = op->pinv * b;
}

}  // namespace sev
