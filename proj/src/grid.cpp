#include "reluforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reluforge {

Vec uniform_grid(double lo, double hi, std::size_t n) {
    Vec g(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    return g;
}

int grid_threads() {
    int t = 1;
#ifdef _OPENMP
    t = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("RELU_FORGE_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) t = std::min(t, cap);
    }
    return t;
}

std::vector<Vec> evaluate_batch(const Network& net, const std::vector<Vec>& xs) {
    std::vector<Vec> out(xs.size());
    const int nt = grid_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long i = 0; i < static_cast<long long>(xs.size()); ++i)
        out[static_cast<std::size_t>(i)] = evaluate(net, xs[static_cast<std::size_t>(i)]);
    (void)nt;
    return out;
}

std::vector<Vec> evaluate_batch_serial(const Network& net, const std::vector<Vec>& xs) {
    std::vector<Vec> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = evaluate(net, xs[i]);
    return out;
}

double sup_error(const Network& net, const std::function<double(const Vec&)>& f,
                 const std::vector<Vec>& xs, std::size_t out) {
    double m = 0.0;
    const int nt = grid_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt) reduction(max : m)
#endif
    for (long long i = 0; i < static_cast<long long>(xs.size()); ++i) {
        const Vec& x = xs[static_cast<std::size_t>(i)];
        double e = std::fabs(evaluate(net, x)[out] - f(x));
        if (e > m) m = e;
    }
    (void)nt;
    return m;
}

double sup_error_serial(const Network& net, const std::function<double(const Vec&)>& f,
                        const std::vector<Vec>& xs, std::size_t out) {
    double m = 0.0;
    for (const auto& x : xs) m = std::max(m, std::fabs(evaluate(net, x)[out] - f(x)));
    return m;
}

double sup_error_1d(const Network& net, const std::function<double(double)>& f,
                    double lo, double hi, std::size_t n) {
    Vec g = uniform_grid(lo, hi, n);
    std::vector<Vec> xs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) xs[i] = {g[i]};
    return sup_error(net, [&](const Vec& x) { return f(x[0]); }, xs);
}

std::vector<Vec> cube_grid(std::size_t d, std::size_t n) {
    std::vector<Vec> pts;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= (n + 1);
    pts.reserve(total);
    Vec x(d, 0.0);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t t = 0; t < total; ++t) {
        for (std::size_t i = 0; i < d; ++i)
            x[i] = static_cast<double>(idx[i]) / static_cast<double>(n);
        pts.push_back(x);
        for (std::size_t i = 0; i < d; ++i) {
            if (++idx[i] <= n) break;
            idx[i] = 0;
        }
    }
    return pts;
}

} // namespace reluforge
