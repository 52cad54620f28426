#include "stokes_ev/lattice_sums.hpp"

#include "stokes_ev/stokes_kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace sev {

namespace {

constexpr double kPi = std::numbers::pi;

// Visits the points of the cubic shell max(|z1|,|z2|,|z3|) = k in a fixed order.
template <class F>
void for_each_in_shell(int k, F&& f) {
    for (int s : {-k, k}) {
        for (int j = -k; j <= k; ++j)
            for (int l = -k; l <= k; ++l) f(s, j, l);
    }
    for (int s : {-k, k}) {
        for (int i = -k + 1; i <= k - 1; ++i)
            for (int l = -k; l <= k; ++l) f(i, s, l);
    }
    for (int s : {-k, k}) {
        for (int i = -k + 1; i <= k - 1; ++i)
            for (int j = -k + 1; j <= k - 1; ++j) f(i, j, s);
    }
}

double inv_pow(double r2, int power) {
    return power == 2 ? 1.0 / r2 : 1.0 / (r2 * std::sqrt(r2));
}

// Integral over the unit sphere of ((p+2)(xhat.w)^2 - 1) max_i|w_i|^(p-1).
double cube_tail_angular(const Vec3& xhat, int power) {
    const SphereQuadrature q = sphere_quadrature_band(Vec3::Zero(), 1.0, 160);
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec3& w = q.normals[i];
        const double m = w.cwiseAbs().maxCoeff();
        const double c = xhat.dot(w);
        s.add(q.weights[i] * ((power + 2) * c * c - 1.0) * std::pow(m, power - 1));
    }
    return s.value();
}

}  // namespace

std::vector<Vec3> ball_samples(std::size_t n, double radius, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto unit = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<Vec3> out;
    out.reserve(n);
    while (out.size() < n) {
        const Vec3 x(2.0 * unit() - 1.0, 2.0 * unit() - 1.0, 2.0 * unit() - 1.0);
        if (x.squaredNorm() < 1.0) out.push_back(radius * x);
    }
    return out;
}

double lattice_bound(int power) {
    if (power == 2) return (876.0 + 504.0 * std::sqrt(3.0)) * kPi;
    if (power == 3)
        return 2.0 * kPi * (159.0 + 92.0 * std::sqrt(3.0) + std::log(4.0) - std::log(7.0 - 4.0 * std::sqrt(3.0)));
    throw DomainError("lattice sums are defined for power 2 or 3");
}

LatticeSumResult regularized_sum(const Vec3& x, int power, double rho, double tol, int max_shells) {
    if (power != 2 && power != 3) throw DomainError("lattice sums are defined for power 2 or 3");
    if (!(rho >= 0.0)) throw DomainError("cutoff radius must be non-negative");
    LatticeSumResult res;
    res.x = x;
    res.power = power;
    res.rho = rho;

    CompensatedSum acc;
    auto add_shell = [&](int k, double cutoff) {
        for_each_in_shell(k, [&](int i, int j, int l) {
            const Vec3 z(i, j, l);
            const double z2 = z.squaredNorm();
            if (std::isfinite(cutoff) && !(z2 < cutoff * cutoff)) return;
            const double d2 = (x - z).squaredNorm();
            if (d2 == 0.0) throw PoleError("evaluation point coincides with a lattice point");
            acc.add(inv_pow(d2, power) - inv_pow(z2, power));
            ++res.terms_used;
        });
    };

    if (std::isfinite(rho)) {
        const int K = static_cast<int>(std::ceil(rho));
        for (int k = 1; k <= K; ++k) add_shell(k, rho);
        res.shells = K;
        res.value = acc.value();
        return res;
    }

    const double x2 = x.squaredNorm();
    const double J = x2 > 0.0 ? cube_tail_angular(x / std::sqrt(x2), power) : 0.0;
    auto tail = [&](int K) {
        const double L = K + 0.5;
        return 0.5 * power * x2 / (power - 1.0) * std::pow(L, 1.0 - power) * J;
    };
    double previous = 0.0;
    bool have_previous = false;
    int next_check = 8;
    res.converged = false;
    for (int k = 1; k <= max_shells; ++k) {
        add_shell(k, kInf);
        if (k != next_check && k != max_shells) continue;
        const double corrected = acc.value() + tail(k);
        res.shells = k;
        res.value = corrected;
        if (have_previous) {
            res.tail_estimate = std::abs(corrected - previous);
            if (res.tail_estimate < tol) {
                res.converged = true;
                break;
            }
        }
        previous = corrected;
        have_previous = true;
        next_check *= 2;
    }
    return res;
}

Mat3 regularized_stress_sum(const Vec3& x, double a, const StrainRate& eps, double eta,
                            const std::vector<Vec3>& centers) {
    if (centers.empty()) return Mat3::Zero();
    std::size_t nearest = 0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        if ((x - centers[k]).norm() < a) throw DomainError("point lies inside a sphere");
        if ((x - centers[k]).norm() < (x - centers[nearest]).norm()) nearest = k;
    }
    Mat3 out = Mat3::Zero();
    for (std::size_t k = 0; k < centers.size(); ++k) {
        out += sphere_disturbance(x - centers[k], a, eps.eps, eta).sigma;
        if (k != nearest) out -= sphere_disturbance(centers[k] - centers[nearest], a, eps.eps, eta).sigma;
    }
    return out;
}

}  // namespace sev
