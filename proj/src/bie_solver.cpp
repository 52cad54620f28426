#include "stokes_ev/bie_solver.hpp"

#include "stokes_ev/spherical_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace sev {

ParticleCondition ParticleCondition::rigid(const Vec3& v, const Vec3& omega) {
    ParticleCondition c;
    c.kind = Kind::Rigid;
    c.v = v;
    c.omega = omega;
    return c;
}

ParticleCondition ParticleCondition::free() {
    ParticleCondition c;
    c.kind = Kind::Free;
    return c;
}

ParticleCondition ParticleCondition::general(VelocityFn f) {
    ParticleCondition c;
    c.kind = Kind::General;
    c.data = std::move(f);
    return c;
}

Vec3 TractionPatch::traction_at(const Vec3& x) const {
    Eigen::VectorXd y(sh_count(band));
    real_sh(band, x - center, y.data());
    return coeffs.transpose() * y;
}

Vec3 TractionPatch::fluid_normal(const Vec3& x) const { return sign * (x - center).normalized(); }

namespace {

constexpr double kPi = std::numbers::pi;

inline Mat3 stokeslet(const Vec3& x) {
    const double r2 = x.squaredNorm(), r = std::sqrt(r2);
    return (Mat3::Identity() / r + x * x.transpose() / (r2 * r)) / (8.0 * kPi);
}

// Double-layer kernel contracted with the source normal; DL += K u.
inline Mat3 double_layer(const Vec3& x, const Vec3& n) {
    const double r2 = x.squaredNorm();
    return (-3.0 / (4.0 * kPi) * x.dot(n) / (r2 * r2 * std::sqrt(r2))) * (x * x.transpose());
}

inline Vec3 pressure_kernel(const Vec3& x) {
    const double r = x.norm();
    return x / (4.0 * kPi * r * r * r);
}

struct Surface {
    int id;
    Vec3 c;
    double rho;
    double sign;
    int band;
    int P;
    SphereQuadrature q;
    Eigen::MatrixXd Y;   // nodes x P
    Eigen::MatrixXd Q;   // P x nodes
    Eigen::VectorXd vn;  // coefficients of n, layout a * P + k
    ParticleCondition cond;
    VelocityFn data;     // known data (empty for free particles)
};

Surface make_surface(int id, const Vec3& c, double rho, double sign, int band) {
    Surface s;
    s.id = id;
    s.c = c;
    s.rho = rho;
    s.sign = sign;
    s.band = band;
    s.P = sh_count(band);
    s.q = sphere_quadrature_band(c, rho, band);
    s.Y = real_sh_matrix(band, s.q.normals);
    s.Q = s.Y.transpose();
    for (std::size_t i = 0; i < s.q.size(); ++i) s.Q.col(static_cast<Eigen::Index>(i)) *= s.q.weights[i] / (rho * rho);
    s.vn.resize(3 * s.P);
    for (int a = 0; a < 3; ++a) {
        Eigen::VectorXd f(static_cast<Eigen::Index>(s.q.size()));
        for (std::size_t i = 0; i < s.q.size(); ++i) f[static_cast<Eigen::Index>(i)] = s.q.normals[i][a];
        s.vn.segment(a * s.P, s.P) = s.Q * f;
    }
    return s;
}

// Node values (nodes x 3) -> coefficient vector (3P).
Eigen::VectorXd project(const Surface& T, const Eigen::MatrixXd& values) {
    Eigen::VectorXd out(3 * T.P);
    for (int a = 0; a < 3; ++a) out.segment(a * T.P, T.P) = T.Q * values.col(a);
    return out;
}

int self_theta(int band) { return band + 9; }
int self_phi(int band) { return 2 * band + 10; }

// Projected single-layer self block on the unit sphere with unit viscosity.
std::shared_ptr<const Eigen::MatrixXd> self_block(int band) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const Eigen::MatrixXd>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(band);
        if (it != cache.end()) return it->second;
    }
    const Surface U = make_surface(0, Vec3::Zero(), 1.0, 1.0, band);
    const int P = U.P;
    const auto n = static_cast<Eigen::Index>(U.q.size());
    // rows[(i, a), b * P + k]
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(3 * n, 3 * P);
    parallel_for(U.q.size(), [&](std::size_t b, std::size_t e) {
        Eigen::VectorXd y(P);
        for (std::size_t i = b; i < e; ++i) {
            const Vec3& xi = U.q.normals[i];
            const RotatedGrid g = rotated_grid(xi, self_theta(band), self_phi(band));
            for (std::size_t k = 0; k < g.dirs.size(); ++k) {
                const Mat3 G = stokeslet(xi - g.dirs[k]) * g.weights[k];
                real_sh(band, g.dirs[k], y.data());
                for (int a = 0; a < 3; ++a)
                    for (int c = 0; c < 3; ++c)
                        rows.row(3 * static_cast<Eigen::Index>(i) + a).segment(c * P, P) += G(a, c) * y.transpose();
            }
        }
    });
    auto blk = std::make_shared<Eigen::MatrixXd>(3 * P, 3 * P);
    for (int a = 0; a < 3; ++a) {
        Eigen::MatrixXd ra(n, 3 * P);
        for (Eigen::Index i = 0; i < n; ++i) ra.row(i) = rows.row(3 * i + a);
        blk->middleRows(a * P, P) = U.Q * ra;
    }
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(band, blk);
    return blk;
}

// Gap between two surfaces (or between a surface and a set of points).
double gap(const Surface& T, const Surface& S) {
    if (S.sign > 0) return S.rho - (T.c.norm() + T.rho);
    if (T.sign > 0) return T.rho - (S.c.norm() + S.rho);
    return (T.c - S.c).norm() - T.rho - S.rho;
}

// Source grid band accurate for targets at distance >= dist from the surface.
int source_band(const Surface& S, double dist) {
    const int need = static_cast<int>(std::ceil(8.0 * kPi * S.rho / std::max(dist, 1e-3)));
    return std::clamp(need, S.band, 160);
}

struct SourceGrid {
    SphereQuadrature q;
    Eigen::MatrixXd Y;  // nodes x P of the density band
};

SourceGrid source_grid(const Surface& S, int band) {
    SourceGrid g;
    g.q = sphere_quadrature_band(S.c, S.rho, band);
    g.Y = real_sh_matrix(S.band, g.q.normals);
    return g;
}

// Projected single-layer block from source S to the nodes of target T (3 P_T x 3 P_S).
Eigen::MatrixXd cross_block(const Surface& T, const Surface& S, double eta) {
    const SourceGrid g = source_grid(S, source_band(S, gap(T, S)));
    const auto nt = static_cast<Eigen::Index>(T.q.size());
    const auto ns = static_cast<Eigen::Index>(g.q.size());
    std::array<Eigen::MatrixXd, 6> K;
    for (auto& k : K) k.resize(nt, ns);
    parallel_for(static_cast<std::size_t>(nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            for (Eigen::Index k = 0; k < ns; ++k) {
                const Mat3 G = stokeslet(T.q.nodes[i] - g.q.nodes[static_cast<std::size_t>(k)]) *
                               (g.q.weights[static_cast<std::size_t>(k)] / eta);
                const auto ii = static_cast<Eigen::Index>(i);
                K[0](ii, k) = G(0, 0);
                K[1](ii, k) = G(0, 1);
                K[2](ii, k) = G(0, 2);
                K[3](ii, k) = G(1, 1);
                K[4](ii, k) = G(1, 2);
                K[5](ii, k) = G(2, 2);
            }
        }
    });
    static constexpr int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    Eigen::MatrixXd out(3 * T.P, 3 * S.P);
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            const Eigen::MatrixXd blk = T.Q * (K[idx[a][b]] * g.Y);
            out.block(a * T.P, b * S.P, T.P, S.P) = blk;
            if (b != a) out.block(b * T.P, a * S.P, T.P, S.P) = blk;
        }
    return out;
}

// Double layer of S's data at arbitrary points outside (or on, for S itself) S.
Eigen::MatrixXd double_layer_at(const Surface& S, const std::vector<Vec3>& targets, double dist) {
    const SphereQuadrature g = sphere_quadrature_band(S.c, S.rho, source_band(S, dist));
    std::vector<Vec3> data(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) data[k] = S.data(g.nodes[k]);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(targets.size()), 3);
    parallel_for(targets.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Vec3 s = Vec3::Zero();
            for (std::size_t k = 0; k < g.size(); ++k)
                s += double_layer(targets[i] - g.nodes[k], g.normals[k]) * data[k] * g.weights[k];
            out.row(static_cast<Eigen::Index>(i)) = s.transpose();
        }
    });
    return out;
}

// Weakly singular double layer of S's data at its own nodes.
Eigen::MatrixXd double_layer_self(const Surface& S) {
    const auto n = static_cast<Eigen::Index>(S.q.size());
    Eigen::MatrixXd out(n, 3);
    const int mt = S.band + 16, mp = 2 * S.band + 24;
    parallel_for(S.q.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const RotatedGrid g = rotated_grid(S.q.normals[i], mt, mp);
            Vec3 s = Vec3::Zero();
            for (std::size_t k = 0; k < g.dirs.size(); ++k) {
                const Vec3 y = S.c + S.rho * g.dirs[k];
                s += double_layer(S.q.nodes[i] - y, g.dirs[k]) * S.data(y) * (g.weights[k] * S.rho * S.rho);
            }
            out.row(static_cast<Eigen::Index>(i)) = s.transpose();
        }
    });
    return out;
}

bool is_rigid(const Surface& S) {
    return S.sign < 0 && S.cond.kind != ParticleCondition::Kind::General;
}

Eigen::MatrixXd node_values(const Surface& S, const VelocityFn& f) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(S.q.size()), 3);
    for (std::size_t i = 0; i < S.q.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = f(S.q.nodes[i]).transpose();
    return out;
}

// Signed single- plus double-layer velocity of one solved surface at points.
struct Contribution {
    const Surface* S;
    const Eigen::MatrixXd* coeffs;  // P x 3
    double eta;
};

std::vector<Vec3> layer_velocity(const Contribution& c, const std::vector<Vec3>& pts, double dist) {
    const Surface& S = *c.S;
    const SourceGrid g = source_grid(S, source_band(S, dist));
    const Eigen::MatrixXd t = g.Y * (*c.coeffs);
    std::vector<Vec3> data;
    const bool dl = !is_rigid(S);
    if (dl) {
        data.resize(g.q.size());
        for (std::size_t k = 0; k < g.q.size(); ++k) data[k] = S.data(g.q.nodes[k]);
    }
    std::vector<Vec3> out(pts.size(), Vec3::Zero());
    parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Vec3 s = Vec3::Zero();
            for (std::size_t k = 0; k < g.q.size(); ++k) {
                const Vec3 x = pts[i] - g.q.nodes[k];
                const Vec3 tk = t.row(static_cast<Eigen::Index>(k)).transpose();
                Vec3 term = stokeslet(x) * tk / c.eta;
                if (dl) term += double_layer(x, g.q.normals[k]) * data[k];
                s += term * g.q.weights[k];
            }
            out[i] = S.sign * s;
        }
    });
    return out;
}

// Signed layer pressure of one surface at a single point, plain quadrature.
double layer_pressure(const Surface& S, const Eigen::MatrixXd& coeffs, const Vec3& x, double eta, double dist) {
    const SourceGrid g = source_grid(S, source_band(S, dist));
    const Eigen::MatrixXd t = g.Y * coeffs;
    const bool dl = !is_rigid(S);
    CompensatedSum s;
    for (std::size_t k = 0; k < g.q.size(); ++k) {
        const Vec3 r = x - g.q.nodes[k];
        double v = pressure_kernel(r).dot(t.row(static_cast<Eigen::Index>(k)).transpose());
        if (dl) v += stresslet_pressure(r, S.data(g.q.nodes[k]) * g.q.normals[k].transpose(), eta);
        s.add(v * g.q.weights[k]);
    }
    return S.sign * s.value();
}

}  // namespace

FieldSample TractionField::evaluate(const Vec3& x) const {
    const double tol = 1e-9;
    if (x.norm() > cfg.R * (1.0 + tol)) throw DomainError("point outside the container");
    for (const auto& c : cfg.centers)
        if ((x - c).norm() < cfg.a * (1.0 - tol)) throw DomainError("point inside a particle");
    Vec3 u = Vec3::Zero();
    Mat3 grad = Mat3::Zero();
    double p = 0.0;
    for (const auto& s : series) {
        const FieldSample f = s.evaluate(x);
        u += f.u;
        grad += f.grad;
        p += f.p;
    }
    return make_sample(u, p, grad, cfg.eta);
}

SolveResult solve_dirichlet(const SuspensionConfig& cfg, const DirichletProblem& problem, const BieOptions& opt) {
    if (problem.particles.size() != cfg.N()) throw ConfigError("one boundary condition per particle is required");
    if (!problem.container) throw ConfigError("container data is required");
    const double eta = cfg.eta;

    std::vector<Surface> surf;
    surf.push_back(make_surface(0, Vec3::Zero(), cfg.R, 1.0, opt.container_band));
    surf.back().data = problem.container;
    for (std::size_t l = 0; l < cfg.N(); ++l) {
        Surface s = make_surface(static_cast<int>(l) + 1, cfg.centers[l], cfg.a, -1.0, opt.particle_band);
        s.cond = problem.particles[l];
        switch (s.cond.kind) {
            case ParticleCondition::Kind::Rigid: {
                const Vec3 v = s.cond.v, w = s.cond.omega, c = s.c;
                s.data = [v, w, c](const Vec3& x) { return Vec3(v + w.cross(x - c)); };
                break;
            }
            case ParticleCondition::Kind::General:
                if (!s.cond.data) throw ConfigError("general particle condition without data");
                s.data = s.cond.data;
                break;
            case ParticleCondition::Kind::Free:
                break;
        }
        surf.push_back(std::move(s));
    }

    // Compatibility of the prescribed data (free particles carry rigid motions).
    {
        double flux = 0.0, scale = 0.0;
        for (const auto& S : surf) {
            if (!S.data) continue;
            for (std::size_t i = 0; i < S.q.size(); ++i) {
                const Vec3 g = S.data(S.q.nodes[i]);
                flux += S.sign * g.dot(S.q.normals[i]) * S.q.weights[i];
                scale += g.norm() * S.q.weights[i];
            }
        }
        if (std::abs(flux) > 1e-8 * std::max(scale, 1e-300))
            throw DomainError("Dirichlet data violate the zero-flux compatibility condition");
    }

    // Unknown layout.
    std::vector<Eigen::Index> off(surf.size() + 1, 0);
    for (std::size_t s = 0; s < surf.size(); ++s) off[s + 1] = off[s] + 3 * surf[s].P;
    std::vector<Eigen::Index> rigid_off(surf.size(), -1);
    Eigen::Index total = off.back();
    for (std::size_t s = 1; s < surf.size(); ++s)
        if (surf[s].cond.kind == ParticleCondition::Kind::Free) {
            rigid_off[s] = total;
            total += 6;
        }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(total, total);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(total);

    for (std::size_t t = 0; t < surf.size(); ++t) {
        const Surface& T = surf[t];
        const auto nt = static_cast<Eigen::Index>(T.q.size());
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nt, 3);
        for (std::size_t s = 0; s < surf.size(); ++s) {
            const Surface& S = surf[s];
            Eigen::MatrixXd blk;
            if (s == t) {
                blk = (S.rho / eta) * (*self_block(S.band));
            } else {
                blk = cross_block(T, S, eta);
            }
            M.block(off[t], off[s], 3 * T.P, 3 * S.P) += S.sign * blk;
        }
        // Known-data terms: 1/2 g_T - sum_S s_S DL_S[g_S].
        if (is_rigid(T)) {
            if (T.cond.kind == ParticleCondition::Kind::Rigid) rhs += node_values(T, T.data);
        } else {
            rhs += 0.5 * node_values(T, T.data) - T.sign * double_layer_self(T);
        }
        for (std::size_t s = 0; s < surf.size(); ++s) {
            if (s == t || is_rigid(surf[s])) continue;
            rhs -= surf[s].sign * double_layer_at(surf[s], T.q.nodes, gap(T, surf[s]));
        }
        b.segment(off[t], 3 * T.P) = project(T, rhs);

        // Rank-one completion for the normal-density null vector.
        M.block(off[t], off[t], 3 * T.P, 3 * T.P) += (T.rho / eta) * T.vn * T.vn.transpose() / T.vn.squaredNorm();

        if (rigid_off[t] >= 0) {
            // Unknown rigid motion on the left: - (v + omega x (x - c)).
            for (int d = 0; d < 6; ++d) {
                Eigen::MatrixXd f = Eigen::MatrixXd::Zero(nt, 3);
                for (Eigen::Index i = 0; i < nt; ++i) {
                    const Vec3 r = T.q.nodes[static_cast<std::size_t>(i)] - T.c;
                    const Vec3 val = d < 3 ? Vec3(Vec3::Unit(d)) : Vec3(Vec3::Unit(d - 3).cross(r));
                    f.row(i) = -val.transpose() / (d < 3 ? 1.0 : T.rho);
                }
                M.block(off[t], rigid_off[t] + d, 3 * T.P, 1) = project(T, f);
            }
            // Zero force and torque, scaled by rho^2 and rho^3.
            for (Eigen::Index i = 0; i < nt; ++i) {
                const auto ii = static_cast<std::size_t>(i);
                const double w = T.q.weights[ii] / (T.rho * T.rho);
                const Vec3 n = T.q.normals[ii];
                for (int a = 0; a < 3; ++a) {
                    const Vec3 ea = Vec3::Unit(a);
                    const Vec3 torque = n.cross(ea);
                    for (int k = 0; k < T.P; ++k) {
                        const double y = T.Y(i, k) * w;
                        M(rigid_off[t] + a, off[t] + a * T.P + k) += y;
                        for (int d = 0; d < 3; ++d) M(rigid_off[t] + 3 + d, off[t] + a * T.P + k) += torque[d] * y;
                    }
                }
            }
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double cond = 1.0 / lu.rcond();
    if (!(cond < opt.max_condition)) throw IllConditionedError("boundary-integral system is ill-conditioned");
    Eigen::VectorXd x = lu.solve(b);
    x += lu.solve(Eigen::VectorXd(b - M * x));
    const double bn = b.norm();
    const double res = bn > 0.0 ? (b - M * x).norm() / bn : (M * x).norm();
    if (!(res < opt.max_relative_residual)) throw ConvergenceError("boundary-integral solve did not converge");

    SolveResult out;
    TractionField& tf = out.field;
    tf.cfg = cfg;
    std::vector<Eigen::MatrixXd> coeffs(surf.size());
    for (std::size_t s = 0; s < surf.size(); ++s) {
        const Surface& S = surf[s];
        Eigen::VectorXd c = x.segment(off[s], 3 * S.P);
        if (s == 0) c -= (c.dot(S.vn) / S.vn.squaredNorm()) * S.vn;  // zero mean normal traction on the container
        coeffs[s].resize(S.P, 3);
        for (int a = 0; a < 3; ++a) coeffs[s].col(a) = c.segment(a * S.P, S.P);
        if (rigid_off[s] >= 0) {
            surf[s].cond.v = x.segment<3>(rigid_off[s]);
            surf[s].cond.omega = x.segment<3>(rigid_off[s] + 3) / S.rho;
            const Vec3 v = surf[s].cond.v, w = surf[s].cond.omega, cc = S.c;
            surf[s].data = [v, w, cc](const Vec3& y) { return Vec3(v + w.cross(y - cc)); };
        }
    }

    // Lamb series of each signed surface contribution.
    tf.series.resize(surf.size());
    for (std::size_t s = 0; s < surf.size(); ++s) {
        const Surface& S = surf[s];
        const int L = S.band + opt.lamb_extra;
        const bool interior = S.sign > 0;
        LambSeries ls(interior ? LambSeries::Kind::Interior : LambSeries::Kind::Exterior, S.c, S.rho, L, eta);
        const double factor = interior ? 0.75 : 1.5;
        const Contribution c{&S, &coeffs[s], eta};
        ls.fit_values(layer_velocity(c, ls.fit_points(factor), std::abs(factor - 1.0) * S.rho), factor);
        if (interior) ls.set_pressure_offset(layer_pressure(S, coeffs[s], S.c, eta, S.rho));
        tf.series[s] = std::move(ls);
    }

    // Particle normal constants: zero representation pressure at each centre.
    for (std::size_t s = 1; s < surf.size(); ++s) {
        const Surface& S = surf[s];
        double others = 0.0;
        for (std::size_t o = 0; o < surf.size(); ++o)
            if (o != s) others += tf.series[o].evaluate(S.c).p;
        const double own = S.sign * layer_pressure(S, coeffs[s], S.c, eta, S.rho);
        const double c = own + others / S.sign;
        for (int a = 0; a < 3; ++a) coeffs[s].col(a) += c * S.vn.segment(a * S.P, S.P);
    }

    for (std::size_t s = 0; s < surf.size(); ++s) {
        const Surface& S = surf[s];
        TractionPatch p;
        p.id = S.id;
        p.center = S.c;
        p.radius = S.rho;
        p.sign = S.sign;
        p.band = S.band;
        p.quad = S.q;
        p.coeffs = coeffs[s];
        const Eigen::MatrixXd t = S.Y * coeffs[s];
        p.traction.resize(S.q.size());
        for (std::size_t i = 0; i < S.q.size(); ++i) p.traction[i] = t.row(static_cast<Eigen::Index>(i)).transpose();
        p.velocity = S.data;
        p.rigid = is_rigid(S);
        p.v = S.cond.v;
        p.omega = S.cond.omega;
        tf.patches.push_back(std::move(p));
    }

    SolveReport& rep = out.report;
    rep.relative_residual = res;
    rep.condition_estimate = cond;
    rep.particle_band = opt.particle_band;
    rep.container_band = opt.container_band;
    rep.unknowns = static_cast<long>(total);

    double err = 0.0, gmax = 0.0;
    Vec3 net = Vec3::Zero();
    for (const auto& p : tf.patches) {
        Vec3 F = Vec3::Zero(), Tq = Vec3::Zero();
        Mat3 S = Mat3::Zero();
        for (std::size_t i = 0; i < p.quad.size(); ++i) {
            const Vec3& x = p.quad.nodes[i];
            const Vec3 g = p.velocity(x);
            err = std::max(err, (tf.evaluate(x).u - g).norm());
            gmax = std::max(gmax, g.norm());
            const double w = p.quad.weights[i];
            F += w * p.traction[i];
            Tq += w * (x - p.center).cross(p.traction[i]);
            S += w * p.traction[i] * (x - p.center).transpose();
        }
        net += p.sign * F;
        if (p.sign < 0) {
            rep.forces.push_back(F);
            rep.torques.push_back(Tq);
            rep.stresslets.push_back(S);
        }
    }
    rep.boundary_velocity_error = gmax > 0.0 ? err / gmax : err;
    rep.force_balance = net.norm();
    rep.energy_boundary = boundary_energy(tf);
    return out;
}

SolveResult solve_pinned(const SuspensionConfig& cfg, const StrainRate& eps, const BieOptions& opt) {
    DirichletProblem pb;
    const Mat3 e = eps.eps;
    pb.container = [e](const Vec3& x) { return Vec3(e * x); };
    for (const auto& c : cfg.centers) pb.particles.push_back(ParticleCondition::rigid(e * c));
    SolveResult r = solve_dirichlet(cfg, pb, opt);
    r.report.eta_hat_plus = eta_hat_plus(r.field, eps);
    return r;
}

SolveResult solve_full(const SuspensionConfig& cfg, const StrainRate& eps, const BieOptions& opt) {
    DirichletProblem pb;
    const Mat3 e = eps.eps;
    pb.container = [e](const Vec3& x) { return Vec3(e * x); };
    for (std::size_t l = 0; l < cfg.N(); ++l) pb.particles.push_back(ParticleCondition::free());
    SolveResult r = solve_dirichlet(cfg, pb, opt);
    r.report.eta_hat_plus = eta_hat_plus(r.field, eps);
    return r;
}

double eta_hat_plus(const TractionField& tf, const StrainRate& eps) {
    const double ee = eps.ddot();
    if (!(ee > 0.0)) throw ZeroStrainError("strain rate is zero");
    double s = 0.0;
    for (const auto& p : tf.patches) {
        if (p.sign > 0) continue;
        Mat3 S = Mat3::Zero();
        for (std::size_t i = 0; i < p.quad.size(); ++i)
            S += p.quad.weights[i] * p.traction[i] * (p.quad.nodes[i] - p.center).transpose();
        s += (eps.eps.array() * S.array()).sum();
    }
    return tf.cfg.eta + s / (2.0 * container_volume(tf.cfg) * ee);
}

double boundary_energy(const TractionField& tf) {
    CompensatedSum s;
    for (const auto& p : tf.patches)
        for (std::size_t i = 0; i < p.quad.size(); ++i)
            s.add(p.sign * p.quad.weights[i] * p.velocity(p.quad.nodes[i]).dot(p.traction[i]));
    return s.value();
}

double volume_energy(const TractionField& tf, const StrainRate& eps, const VolumeRule& rule) {
    const auto& q = rule.quad;
    const double ee = eps.ddot();
    std::vector<double> part(q.size());
    parallel_for(q.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) part[i] = q.weights[i] * (frob2(tf.evaluate(q.nodes[i]).e) - ee);
    });
    CompensatedSum s;
    for (double v : part) s.add(v);
    return 2.0 * tf.cfg.eta * (ee * fluid_volume(tf.cfg) + s.value());
}

void write_traction_csv(std::ostream& os, const TractionField& tf) {
    os << "patch,node,weight,t1,t2,t3\n";
    char buf[160];
    for (const auto& p : tf.patches)
        for (std::size_t i = 0; i < p.quad.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g\n", p.id, i, p.quad.weights[i],
                          p.traction[i][0], p.traction[i][1], p.traction[i][2]);
            os << buf;
        }
}

}  // namespace sev
