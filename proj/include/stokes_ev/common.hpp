#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sev {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Error hierarchy. Every library failure derives from Error so the CLI can
// map it to an exit code in one place.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error { using Error::Error; };
struct OverlapError : ConfigError { using ConfigError::ConfigError; };
struct EmptyError : ConfigError { using ConfigError::ConfigError; };
struct DomainError : Error { using Error::Error; };
struct SingularityError : DomainError { using DomainError::DomainError; };
struct PoleError : DomainError { using DomainError::DomainError; };
struct BudgetError : Error { using Error::Error; };
struct AliasError : Error { using Error::Error; };
struct ZeroStrainError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct IllConditionedError : ConvergenceError { using ConvergenceError::ConvergenceError; };

// Worker count: STOKES_EV_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs body(begin, end) over [0, n) split into contiguous chunks, one per
// worker. Chunk boundaries depend only on n and the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// n-point Gauss-Legendre rule mapped to [lo, hi].
GaussRule gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

// Orthonormal pair (t1, t2) completing the unit vector n to a right-handed frame.
void tangent_frame(const Vec3& n, Vec3& t1, Vec3& t2);

double frob2(const Mat3& m);

}  // namespace sev
