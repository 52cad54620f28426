#pragma once

#include "stokes_ev/common.hpp"
#include "stokes_ev/stokes_kernels.hpp"

namespace sev {

// Exact straining flow between a sphere of radius a held at rest at the
// origin and a concentric container of radius R on which u = eps x. It
// combines four elementary solutions:
//   eps x;  5 r^2 eps x - 2 x (x.eps x) with p = 21 eta x.eps x;
//   2 eps x / r^5 - 5 x (x.eps x) / r^7;  x (x.eps x) / r^5 with p = 2 eta x.eps x / r^5.
class ConcentricSolution {
public:
    ConcentricSolution(double a, double R, const Mat3& eps, double eta);

    FieldSample evaluate(const Vec3& x) const;
    // sigma n with n = x/|x| (pointing away from the origin).
    Vec3 radial_traction(const Vec3& x) const;
    // int sigma n (x)^T dS over |x| = a with n = x/a.
    Mat3 stresslet() const;
    // E = int u . sigma n over the fluid boundary (only the container contributes).
    double energy() const;

    double A, B, C, D;

private:
    double a_, R_, eta_;
    Mat3 eps_;
};

}  // namespace sev
