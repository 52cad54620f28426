#pragma once

#include "stokes_ev/common.hpp"
#include "stokes_ev/geometry.hpp"
#include "stokes_ev/spherical_harmonics.hpp"

#include <array>
#include <complex>

namespace sev {

// Function on the sphere of the given radius centred at the origin, expanded
// as sum G_nk Y_n^k(x/|x|). With this normalization ||f||^2 = R^2 sum |G|^2.
struct SphericalFunction {
    double radius = 1.0;
    int nmax = 0;
    std::vector<std::complex<double>> G;

    std::complex<double>& at(int n, int k) { return G[sh_index(n, k)]; }
    std::complex<double> at(int n, int k) const { return G[sh_index(n, k)]; }
};

SphericalFunction make_spherical_function(double radius, int nmax);

// Quadrature projection onto Y_n^k. Throws AliasError if nmax > q.band.
SphericalFunction analyze(const SphereQuadrature& q, const std::vector<double>& samples, int nmax);
// Real part of the expansion at the directions of the given points.
std::vector<double> synthesize(const SphericalFunction& f, const std::vector<Vec3>& points);

double boundary_l2_norm_sq(const SphericalFunction& f);
// |f|^2_{H^1/2} = sum |G|^2 sqrt(n(n+1)) R.
double boundary_h_half_seminorm_sq(const SphericalFunction& f);
// |f|^2_{H^-1/2} = sum_{n>=1} |G|^2 R^3 / sqrt(n(n+1)).
double boundary_h_minus_half_seminorm_sq(const SphericalFunction& f);

// Solid-harmonic continuation sum G_nk (r/R)^n Y_n^k into B(0,R).
class InteriorExtension {
public:
    explicit InteriorExtension(SphericalFunction f) : f_(std::move(f)) {}

    double value(const Vec3& x) const;
    double l2_norm_sq() const;    // sum |G|^2 R^3 / (3 + 2n)
    double grad_norm_sq() const;  // sum n |G|^2 R
    double h1_norm_sq() const { return l2_norm_sq() + grad_norm_sq(); }
    // Interpolation proxy sqrt(||f|| ||f||_{H^1}) for the H^1/2 norm.
    double h_half_proxy() const;
    const SphericalFunction& boundary() const { return f_; }

private:
    SphericalFunction f_;
};

InteriorExtension harmonic_extension_interior(const SphericalFunction& p);

// Decaying continuation sum G_nk (a/r)^(n+1) Y_n^k on a < r < d.
class ExteriorExtension {
public:
    ExteriorExtension(SphericalFunction f, double d) : f_(std::move(f)), d_(d) {}

    double value(const Vec3& x) const;
    double l2_norm_sq() const;
    double grad_norm_sq() const;
    double h_half_proxy() const;
    double bound() const;  // lemma constant times ||p||_{dB(0,a)}

private:
    SphericalFunction f_;
    double d_;
};

ExteriorExtension extension_exterior(const SphericalFunction& p, double d);

double interior_l2_constant(double R);                // sqrt(R/3)
double interior_h_half_constant(double R);            // (1/2)^(1/4) (1 + R/3)^(1/4)
double exterior_h_half_constant(double a, double d);  // 2^(1/8) (d + 1/a + sqrt2)^(1/4)

// Smooth cutoffs around a sphere (zeta_E, equal to 1 at r = a and 0 for r >= d)
// and near the container (zeta_I, equal to 1 at r = R and 0 for r <= d).
struct CutoffPair {
    double a = 0.0;
    double d = 1.0;
    double R = 2.0;

    double zeta_e(double r) const;
    double dzeta_e(double r) const;
    double zeta_i(double r) const;
    double dzeta_i(double r) const;
};

// max_s e exp(-1/(1-s^2)) 2s/(1-s^2)^2, the sharp constant in
// sup |zeta_E'| = c / (d - a).
double cutoff_slope_constant();

// Principal-value operator (Pi t)(xi) = p.v. int P(xi - nu) . t(nu) dS_nu on
// the sphere of q. Returns the (n x 3n) matrix acting on node values ordered
// (t1, t2, t3) per node. The density is interpolated to band nmax (default
// q.band) and integrated on rotated product grids whose pole is the target.
Eigen::MatrixXd pi_operator_matrix(const SphereQuadrature& q, int nmax = -1);
std::vector<double> pi_apply(const SphereQuadrature& q, const std::vector<Vec3>& tractions, int nmax = -1);

// Largest singular value of W^(1/2) Pi W^(-1/2) on the band-nmax grid.
double pi_norm_estimate(double radius, int nmax);

struct PiNormSequence {
    std::vector<int> orders;
    std::vector<double> estimates;
};
// Throws ConvergenceError if successive estimates differ by more than 0.02.
PiNormSequence pi_norm_sequence(double radius, const std::vector<int>& orders);

// Exact degree-n action of Pi on unit-norm normal and gradient components.
std::array<double, 2> pi_degree_multipliers(int n);

// int_{|xi| < L} exp(-2 pi i <xi, nu>) xi / (4 pi |xi|^3) d^2 xi by polar
// product quadrature; L defaults to 120 / |nu|.
std::array<std::complex<double>, 2> flat_symbol(const Eigen::Vector2d& nu, double L = -1.0);

struct DivergenceIdentityResult {
    std::vector<Vec3> points;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double residual = 0.0;  // max |lhs - rhs| / max |rhs|
};

// Left side: centred-difference divergence of F(xi) = int n (P(xi - nu) . u) dS
// over the container and sphere boundaries (n outward from the fluid). Right
// side: -sum (c/a) Pi u + (c/R) Pi u + Pi du/dn with c = div_coefficient.
DivergenceIdentityResult divergence_identity_check(
    const std::function<void(const Vec3&, Vec3&, Mat3&)>& field, const SuspensionConfig& cfg, int order,
    const std::vector<Vec3>& points, double div_coefficient = 3.0, double h = 1e-4);

}  // namespace sev
