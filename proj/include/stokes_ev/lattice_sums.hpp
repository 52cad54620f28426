#pragma once

#include "stokes_ev/common.hpp"
#include "stokes_ev/geometry.hpp"

#include <cstdint>
#include <limits>

namespace sev {

struct LatticeSumResult {
    double value = 0.0;
    double rho = 0.0;
    int power = 2;
    Vec3 x = Vec3::Zero();
    long long terms_used = 0;
    // Cubic shell index reached, and for rho = infinity the size of the last
    // change of the tail-corrected sum.
    int shells = 0;
    double tail_estimate = 0.0;
    bool converged = true;
};

// Sum over z in Z^3 \ {0} with |z| < rho of 1/|x-z|^p - 1/|z|^p, accumulated
// shell by shell (max |z_i| = k) in compensated arithmetic. rho = infinity
// sums whole cubic shells, adds the integral of the leading even Taylor term
// outside the last cube, and stops when successive corrected values differ by
// less than tol.
LatticeSumResult regularized_sum(const Vec3& x, int power, double rho,
                                 double tol = 1e-8, int max_shells = 96);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// n points uniformly distributed in the open ball B(0, radius), reproducible
// for a fixed seed.
std::vector<Vec3> ball_samples(std::size_t n, double radius, std::uint64_t seed);

// Upper bounds proved for |x| < sqrt(3)/2.
double lattice_bound(int power);

// sum_k [sigma'(x - x^k) - sigma_r(x^k - x^n)] where x^n is the centre
// nearest to x and sigma_r(0) = 0, sigma_r(z) = sigma'(z) otherwise.
Mat3 regularized_stress_sum(const Vec3& x, double a, const StrainRate& eps, double eta,
                            const std::vector<Vec3>& centers);

}  // namespace sev
