#include "stokes_ev/concentric.hpp"

#include "stokes_ev/geometry.hpp"

#include <cmath>

namespace sev {

ConcentricSolution::ConcentricSolution(double a, double R, const Mat3& eps, double eta)
    : a_(a), R_(R), eta_(eta), eps_(eps) {
    if (!(a > 0.0 && R > a)) throw DomainError("need 0 < a < R");
    // Rows: coefficient of eps x at r = a and r = R, then of x (x.eps x) at both radii.
    Eigen::Matrix4d M;
    Eigen::Vector4d rhs(0.0, 1.0, 0.0, 0.0);
    const double rs[2] = {a, R};
    for (int k = 0; k < 2; ++k) {
        const double r = rs[k];
        M.row(k) << 1.0, 5.0 * r * r, 2.0 / std::pow(r, 5), 0.0;
        M.row(2 + k) << 0.0, -2.0, -5.0 / std::pow(r, 7), 1.0 / std::pow(r, 5);
    }
    const Eigen::Vector4d c = M.fullPivLu().solve(rhs);
    A = c[0];
    B = c[1];
    C = c[2];
    D = c[3];
}

FieldSample ConcentricSolution::evaluate(const Vec3& x) const {
    const double r = x.norm();
    if (r < a_ * (1.0 - 1e-12) || r > R_ * (1.0 + 1e-12)) throw DomainError("point outside the annulus");
    const Vec3 ex = eps_ * x;
    const double q = x.dot(ex);
    const double f = A + 5.0 * B * r * r + 2.0 * C / std::pow(r, 5);
    const double df = 10.0 * B * r - 10.0 * C / std::pow(r, 6);
    const double g = -2.0 * B - 5.0 * C / std::pow(r, 7) + D / std::pow(r, 5);
    const double dg = 35.0 * C / std::pow(r, 8) - 5.0 * D / std::pow(r, 6);
    const Vec3 u = f * ex + g * q * x;
    Mat3 grad = f * eps_ + (df / r) * ex * x.transpose() + g * q * Mat3::Identity() +
                (dg / r) * q * x * x.transpose() + 2.0 * g * x * ex.transpose();
    const double p = eta_ * (21.0 * B + 2.0 * D / std::pow(r, 5)) * q;
    return make_sample(u, p, grad, eta_);
}

Vec3 ConcentricSolution::radial_traction(const Vec3& x) const { return evaluate(x).sigma * x.normalized(); }

Mat3 ConcentricSolution::stresslet() const {
    const SphereQuadrature q = sphere_quadrature_band(Vec3::Zero(), a_, 8);
    Mat3 S = Mat3::Zero();
    for (std::size_t i = 0; i < q.size(); ++i) S += q.weights[i] * radial_traction(q.nodes[i]) * q.nodes[i].transpose();
    return S;
}

double ConcentricSolution::energy() const {
    const SphereQuadrature q = sphere_quadrature_band(Vec3::Zero(), R_, 8);
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i) s.add(q.weights[i] * (eps_ * q.nodes[i]).dot(radial_traction(q.nodes[i])));
    return s.value();
}

}  // namespace sev
