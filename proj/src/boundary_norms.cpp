#include "stokes_ev/inequality_audit.hpp"

#include <cmath>

namespace sev {

FlowAccess flow_access(const TractionField& tf) {
    FlowAccess f;
    f.cfg = tf.cfg;
    const TractionField* p = &tf;
    f.field = [p](const Vec3& x) { return p->evaluate(x); };
    f.data = [p](int k, const Vec3& x) { return p->patches[static_cast<std::size_t>(k)].velocity(x); };
    f.traction = [p](int k, const Vec3& x) { return p->patches[static_cast<std::size_t>(k)].traction_at(x); };
    return f;
}

BoundaryNorms boundary_norms(const TractionField& tf, int band, const VolumeRule* rule) {
    return boundary_norms(flow_access(tf), band, rule);
}

namespace {

struct NodeData {
    double w;
    int patch;
    Vec3 n;  // out of the fluid
    std::array<Vec3, 2> tau;
    Vec3 g;
    std::array<Vec3, 2> dg;  // finite differences of the data along tau
    FieldSample f;
    Vec3 t;  // sigma n with n out of the fluid
};

}  // namespace

BoundaryNorms boundary_norms(const FlowAccess& flow, int band, const VolumeRule* rule) {
    const SuspensionConfig& cfg = flow.cfg;
    const double eta = cfg.eta;
    std::vector<NodeData> nodes;
    for (std::size_t k = 0; k <= cfg.N(); ++k) {
        const Vec3 c = k == 0 ? Vec3::Zero() : cfg.centers[k - 1];
        const double rho = k == 0 ? cfg.R : cfg.a;
        const double sign = k == 0 ? 1.0 : -1.0;
        const SphereQuadrature q = sphere_quadrature_band(c, rho, band);
        for (std::size_t i = 0; i < q.size(); ++i) {
            NodeData nd;
            nd.w = q.weights[i];
            nd.patch = static_cast<int>(k);
            nd.n = sign * q.normals[i];
            tangent_frame(nd.n, nd.tau[0], nd.tau[1]);
            nodes.push_back(nd);
        }
    }

    parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            NodeData& nd = nodes[i];
            const Vec3 c = nd.patch == 0 ? Vec3::Zero() : cfg.centers[static_cast<std::size_t>(nd.patch - 1)];
            const double rho = nd.patch == 0 ? cfg.R : cfg.a;
            const Vec3 nn = nd.patch == 0 ? nd.n : Vec3(-nd.n);  // away from the centre
            const Vec3 x = c + rho * nn;
            nd.g = flow.data(nd.patch, x);
            // Central differences along great circles through x.
            const double h = 1e-4 * rho;
            for (int j = 0; j < 2; ++j) {
                const double s = h / rho;
                const Vec3 xp = c + rho * (std::cos(s) * nn + std::sin(s) * nd.tau[static_cast<std::size_t>(j)]);
                const Vec3 xm = c + rho * (std::cos(s) * nn - std::sin(s) * nd.tau[static_cast<std::size_t>(j)]);
                nd.dg[static_cast<std::size_t>(j)] = (flow.data(nd.patch, xp) - flow.data(nd.patch, xm)) / (2.0 * h);
            }
            nd.f = flow.field(x);
            const Vec3 t_nat = flow.traction ? flow.traction(nd.patch, x) : Vec3(nd.f.sigma * nn);
            nd.t = nd.patch == 0 ? t_nat : Vec3(-t_nat);
        }
    });

    BoundaryNorms out;
    out.band = band;
    CompensatedSum area, pint;
    for (const auto& nd : nodes) {
        area.add(nd.w);
        pint.add(nd.w * nd.f.p);
    }
    const double C = -pint.value() / area.value();
    out.pressure_shift = C;

    double t2 = 0, p2 = 0, u2 = 0, us2 = 0, uc2 = 0, w2 = 0, wid2 = 0, lhs = 0, rhs = 0, tm2 = 0, pm2 = 0;
    std::array<double, 2> d2{0, 0}, ds2{0, 0};
    for (const auto& nd : nodes) {
        const double w = nd.w;
        const Vec3 t = nd.t - C * nd.n;
        const double p = nd.f.p + C;
        const Vec3 dudn = nd.f.grad * nd.n;
        double Dp = 0.0;
        Vec3 tang = Vec3::Zero();
        for (std::size_t j = 0; j < 2; ++j) {
            Dp -= nd.tau[j].dot(nd.dg[j]);
            tang += nd.tau[j] * nd.n.dot(nd.dg[j]);
            d2[j] += w * nd.dg[j].squaredNorm();
            ds2[j] += w * (nd.f.grad * nd.tau[j]).squaredNorm();
            rhs += 2.0 * w * std::pow(nd.tau[j].dot(nd.dg[j]), 2);
        }
        const Vec3 Pt = t - nd.n * nd.n.dot(t);
        const Vec3 dudn_id = Pt / eta - tang + Dp * nd.n;
        const double p_id = 2.0 * eta * Dp - nd.n.dot(t);
        t2 += w * t.squaredNorm();
        p2 += w * p * p;
        u2 += w * nd.g.squaredNorm();
        (nd.patch == 0 ? uc2 : us2) += w * nd.g.squaredNorm();
        w2 += w * dudn.squaredNorm();
        wid2 += w * dudn_id.squaredNorm();
        lhs += w * std::pow(nd.n.dot(dudn), 2);
        tm2 += w * (nd.t - nd.f.sigma * nd.n).squaredNorm();
        pm2 += w * (p - p_id) * (p - p_id);
    }
    out.t = std::sqrt(t2);
    out.p = std::sqrt(p2);
    out.u = std::sqrt(u2);
    out.u_spheres = std::sqrt(us2);
    out.u_container = std::sqrt(uc2);
    out.dudn = std::sqrt(w2);
    out.dudn_identity = std::sqrt(wid2);
    for (std::size_t j = 0; j < 2; ++j) {
        out.dtau[j] = std::sqrt(d2[j]);
        out.dtau_spectral[j] = std::sqrt(ds2[j]);
    }
    out.incompressibility_lhs = lhs;
    out.incompressibility_rhs = rhs;
    out.traction_mismatch = out.t > 0.0 ? std::sqrt(tm2) / out.t : std::sqrt(tm2);
    out.pressure_mismatch = out.p > 0.0 ? std::sqrt(pm2) / out.p : std::sqrt(pm2);

    if (rule) {
        const auto& q = rule->quad;
        std::vector<double> pp(q.size()), ee(q.size());
        parallel_for(q.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const FieldSample f = flow.field(q.nodes[i]);
                pp[i] = q.weights[i] * std::pow(f.p + C, 2);
                ee[i] = q.weights[i] * frob2(f.e);
            }
        });
        CompensatedSum sp, se;
        for (std::size_t i = 0; i < q.size(); ++i) {
            sp.add(pp[i]);
            se.add(ee[i]);
        }
        out.has_volume = true;
        out.p_volume = std::sqrt(std::max(sp.value(), 0.0));
        out.strain_volume = se.value();
    }
    return out;
}

}  // namespace sev
