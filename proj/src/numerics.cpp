#include "stokes_ev/common.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

namespace sev {

unsigned worker_count() {
    if (const char* env = std::getenv("STOKES_EV_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t b = w * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& t : pool) t.join();
}

void CompensatedSum::add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

GaussRule gauss_legendre(int n, double lo, double hi) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    // Reference rules on [-1, 1] are cached; the GSL tables are immutable.
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    GaussRule ref;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it == cache.end()) {
            gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(n);
            GaussRule r;
            r.x.resize(n);
            r.w.resize(n);
            for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &r.x[i], &r.w[i], tab);
            gsl_integration_glfixed_table_free(tab);
            it = cache.emplace(n, std::move(r)).first;
        }
        ref = it->second;
    }
    double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < n; ++i) {
        ref.x[i] = mid + half * ref.x[i];
        ref.w[i] *= half;
    }
    return ref;
}

void tangent_frame(const Vec3& n, Vec3& t1, Vec3& t2) {
    Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    t1 = n.cross(helper).normalized();
    t2 = n.cross(t1);
}

double frob2(const Mat3& m) { return m.cwiseProduct(m).sum(); }

}  // namespace sev
