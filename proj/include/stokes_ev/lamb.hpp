#pragma once

#include "stokes_ev/common.hpp"
#include "stokes_ev/stokes_kernels.hpp"

namespace sev {

// Value, gradient and Hessian of a scalar function of position.
struct Jet {
    double v = 0.0;
    Vec3 g = Vec3::Zero();
    Mat3 h = Mat3::Zero();
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(double s, const Jet& a);

// Real solid harmonics r^n Y_nm (regular) or r^(-n-1) Y_nm (irregular) for
// n <= L, with Y_nm proportional to P_n^m(cos theta) {cos, sin}(m phi) and
// normalized by sqrt((n-m)!/(n+m)!). Entries are ordered by sh_index(n, m).
// Derivatives come from ladder relations between neighbouring degrees.
// Degrees up to 62 are supported.
void solid_harmonics(int L, const Vec3& x, bool irregular, std::vector<Jet>& out);
// Same values built by jet arithmetic on the three-term recurrences; slower,
// kept as an independent cross-check.
void solid_harmonics_direct(int L, const Vec3& x, bool irregular, std::vector<Jet>& out);

// Stokes flow given by Lamb's general solution about `center`. Interior
// series are regular in the ball, exterior series decay at infinity. The
// basis is built from solid harmonics of degree k (k = n inside, k = -n-1
// outside) as three families:
//   pressure  u = [(k+3) r^2 grad h - 2k x h] / (2 (k+1) (2k+3)), p = h
//   potential u = grad h
//   toroidal  u = grad h x x
// in coordinates scaled by `scale`, so that physical p = eta h / scale.
class LambSeries {
public:
    enum class Kind { Interior, Exterior };

    LambSeries() = default;
    LambSeries(Kind kind, const Vec3& center, double scale, int degree, double eta);

    Kind kind() const { return kind_; }
    const Vec3& center() const { return center_; }
    double scale() const { return scale_; }
    int degree() const { return degree_; }
    Eigen::Index basis_size() const { return static_cast<Eigen::Index>(terms_.size()); }

    Eigen::VectorXd& coefficients() { return coeffs_; }
    const Eigen::VectorXd& coefficients() const { return coeffs_; }
    void set_pressure_offset(double p0) { pressure_offset_ = p0; }
    double pressure_offset() const { return pressure_offset_; }

    FieldSample evaluate(const Vec3& x) const;

    // Velocity of every basis function at x (3 x basis_size), unit eta.
    Eigen::MatrixXd basis_velocity(const Vec3& x) const;

    // Least-squares fit of the coefficients to a velocity field sampled on
    // the sphere of radius radius_factor * scale about the centre.
    void fit(const std::function<Vec3(const Vec3&)>& velocity, double radius_factor);
    // Same fit from precomputed samples at fit_points(radius_factor), in order.
    std::vector<Vec3> fit_points(double radius_factor) const;
    void fit_values(const std::vector<Vec3>& values, double radius_factor);

    struct Term {
        int family;  // 0 pressure, 1 potential, 2 toroidal
        int n;
        int m;
    };
    const std::vector<Term>& terms() const { return terms_; }

private:

    int k_of(int n) const { return kind_ == Kind::Interior ? n : -n - 1; }

    Kind kind_ = Kind::Interior;
    Vec3 center_ = Vec3::Zero();
    double scale_ = 1.0;
    int degree_ = 0;
    double eta_ = 1.0;
    double pressure_offset_ = 0.0;
    std::vector<Term> terms_;
    Eigen::VectorXd coeffs_;
};

}  // namespace sev
