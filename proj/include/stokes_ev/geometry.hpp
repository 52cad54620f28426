#pragma once

#include "stokes_ev/common.hpp"

#include <cstdint>
#include <optional>

namespace sev {

// Spheres of radius a on unit-spaced lattice points inside a ball of radius R.
struct SuspensionConfig {
    double R = 0.0;
    double a = 0.0;
    double d = 1.0;
    double eta = 1.0;
    std::vector<Vec3> centers;

    std::size_t N() const { return centers.size(); }
};

// Centers are the points z of Z^3 with |z| < R - 1, in lexicographic order.
SuspensionConfig build_config(double R, double a, double eta);

// Explicit center list; validates non-overlap and containment.
SuspensionConfig config_from_centers(double R, double a, double eta, std::vector<Vec3> centers);

// The origin and its six nearest lattice neighbours.
std::vector<Vec3> nearest_neighbour_cross();

// Membership rule |z| + d/2 - a < R used by the traction estimates.
bool in_lambda(const Vec3& z, double R, double a, double d = 1.0);
std::vector<Vec3> lambda_set(double R, double a, double d = 1.0);

// (4 pi / 3) a^3 with unit lattice spacing.
double volume_fraction(const SuspensionConfig& cfg);
double volume_fraction(double a);
// Fraction of the container occupied by particles, N a^3 / R^3.
double container_fraction(const SuspensionConfig& cfg);
double container_volume(const SuspensionConfig& cfg);
double fluid_volume(const SuspensionConfig& cfg);
bool in_fluid(const SuspensionConfig& cfg, const Vec3& x);

struct StrainRate {
    Mat3 eps = Mat3::Zero();

    double ddot() const { return frob2(eps); }
};

// Throws DomainError unless m is symmetric and traceless to 1e-12 relative.
StrainRate make_strain(const Mat3& m);
StrainRate strain_diag(double e1, double e2, double e3);

// Product rule on a sphere: Gauss-Legendre in cos(theta) with p+1 nodes and
// 2(p+1) equispaced azimuths shifted by half a step. Exact for polynomials of
// degree <= 2p+1 and invariant under x -> -x.
struct SphereQuadrature {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
    int band = 0;
    int order = 1;
    std::vector<Vec3> nodes;
    std::vector<Vec3> normals;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

SphereQuadrature sphere_quadrature(const Vec3& center, double radius, int order);
SphereQuadrature sphere_quadrature_band(const Vec3& center, double radius, int band);

// Nodes and weights for integrals over the fluid region.
struct BallQuadrature {
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    double target_rel_err = 0.0;
    std::uint64_t seed = 0;
    double rel_err_estimate = 0.0;

    double weight_sum() const;
    std::size_t size() const { return nodes.size(); }
};

// Stratified Monte Carlo over B(0,R) with rejection inside the spheres and
// extra samples in the shells a < |x - x^l| < min(1.5a, 0.5).
BallQuadrature ball_quadrature(const SuspensionConfig& cfg, double target_rel_err, std::uint64_t seed,
                               std::size_t max_nodes = 4000000);

// Deterministic partition-of-unity rule. Each sphere owns a graded shell rule
// on a < r < shell_radius weighted by a smooth bump; the rest of the ball is
// covered by a product rule weighted by one minus the bumps.
struct VolumeRuleOptions {
    double shell_radius = 0.5;
    int shell_panels = 6;
    int shell_points = 8;
    int shell_band = 16;
    double outer_panel_width = 0.25;
    int outer_points = 8;
    int outer_band = 24;
};

struct VolumeRule {
    BallQuadrature quad;
    // Per node, the index of the sphere whose shell produced it, or -1.
    std::vector<int> owner;
};

VolumeRule fluid_volume_rule(const SuspensionConfig& cfg, const VolumeRuleOptions& opt = {});

// Smooth bump: 1 for r <= inner, 0 for r >= outer, C-infinity in between.
double smooth_bump(double r, double inner, double outer);

}  // namespace sev
