#pragma once

#include "stokes_ev/common.hpp"

#include <complex>

namespace sev {

inline int sh_count(int nmax) { return (nmax + 1) * (nmax + 1); }
inline int sh_index(int n, int m) { return n * n + n + m; }

// Real orthonormal harmonics on the unit sphere at direction dir (any length):
// m > 0 -> sqrt2 N P_n^m cos(m phi), m < 0 -> sqrt2 N P_n^|m| sin(|m| phi).
// out must hold sh_count(nmax) values, ordered by sh_index.
void real_sh(int nmax, const Vec3& dir, double* out);
Eigen::VectorXd real_sh(int nmax, const Vec3& dir);

// Complex orthonormal harmonics Y_n^k with the Condon-Shortley phase.
void complex_sh(int nmax, const Vec3& dir, std::complex<double>* out);

// Rows are real_sh at each direction: (dirs.size() x sh_count(nmax)).
Eigen::MatrixXd real_sh_matrix(int nmax, const std::vector<Vec3>& dirs);

// Product rule whose pole is the unit vector `pole`: Gauss-Legendre in the
// polar angle on [0, pi] (so the sin Jacobian cancels a 1/r singularity at
// the pole) times nphi equispaced azimuths. Weights integrate over the unit
// sphere.
struct RotatedGrid {
    std::vector<Vec3> dirs;
    std::vector<double> weights;
};

RotatedGrid rotated_grid(const Vec3& pole, int ntheta, int nphi);

}  // namespace sev
