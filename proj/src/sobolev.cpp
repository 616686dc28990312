#include "reluforge/sobolev.hpp"

#include <cmath>
#include <stdexcept>

#include "reluforge/algebra.hpp"
#include "reluforge/grid.hpp"

namespace reluforge {

double psi(double z) {
    double a = std::fabs(z);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    return 2.0 - a;
}

double phi(const PoUIndex& idx, const Vec& x) {
    double v = 1.0;
    const double n = static_cast<double>(idx.n);
    for (std::size_t l = 0; l < idx.d; ++l)
        v *= psi(3.0 * n * (x[l] - static_cast<double>(idx.m[l]) / n));
    return v;
}

std::vector<MultiIndex> multi_indices_upto(std::size_t d, std::size_t max_order) {
    std::vector<MultiIndex> out;
    MultiIndex cur{std::vector<std::size_t>(d, 0)};
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
        if (i == d) {
            out.push_back(cur);
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            cur.a[i] = v;
            rec(i + 1, left - v);
        }
        cur.a[i] = 0;
    };
    rec(0, max_order);
    return out;
}

namespace {

double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

double binom_coef(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

} // namespace

LocalPolynomial taylor_local(const DerivativeOracle& f, const PoUIndex& idx, std::size_t k) {
    if (k < 1) throw std::invalid_argument("taylor_local: k >= 1 required");
    const std::size_t d = idx.d;
    Vec c(d);
    for (std::size_t l = 0; l < d; ++l)
        c[l] = static_cast<double>(idx.m[l]) / static_cast<double>(idx.n);

    LocalPolynomial p;
    p.center = idx;
    for (const auto& beta : multi_indices_upto(d, k - 1)) {
        double dv = f.deriv(beta, c);
        if (!std::isfinite(dv)) throw std::runtime_error("taylor_local: OracleFailure");
        double fact = 1.0;
        for (auto b : beta.a) fact *= factorial(b);
        double t = dv / fact;
        if (t == 0.0) continue;
        // expand prod (x_i - c_i)^{beta_i} into the global basis
        std::vector<std::pair<MultiIndex, double>> terms{{MultiIndex{std::vector<std::size_t>(d, 0)}, t}};
        for (std::size_t i = 0; i < d; ++i) {
            if (beta.a[i] == 0) continue;
            std::vector<std::pair<MultiIndex, double>> next;
            for (auto& [a, w] : terms)
                for (std::size_t j = 0; j <= beta.a[i]; ++j) {
                    MultiIndex na = a;
                    na.a[i] += j;
                    next.emplace_back(na, w * binom_coef(beta.a[i], j) *
                                              std::pow(-c[i], static_cast<double>(beta.a[i] - j)));
                }
            terms = std::move(next);
        }
        for (auto& [a, w] : terms) p.coeffs[a] += w;
    }
    return p;
}

double eval_poly(const LocalPolynomial& p, const Vec& x) {
    double s = 0.0;
    for (const auto& [a, c] : p.coeffs) {
        double t = c;
        for (std::size_t i = 0; i < a.a.size(); ++i)
            for (std::size_t r = 0; r < a.a[i]; ++r) t *= x[i];
        s += t;
    }
    return s;
}

double GlobalApprox::operator()(const Vec& x) const {
    // only cells whose bump overlaps x contribute (<= 3^d of them)
    double s = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> range(d);
    for (std::size_t l = 0; l < d; ++l) {
        double t = x[l] * static_cast<double>(n);
        long lo = static_cast<long>(std::floor(t)) - 1;
        long hi = lo + 2;
        range[l] = {static_cast<std::size_t>(std::max(0L, lo)),
                    static_cast<std::size_t>(std::min(static_cast<long>(n), hi))};
    }
    std::vector<std::size_t> m(d);
    for (std::size_t l = 0; l < d; ++l) m[l] = range[l].first;
    while (true) {
        std::size_t flat = 0;
        for (std::size_t l = d; l-- > 0;) flat = flat * (n + 1) + m[l];
        const LocalPolynomial& p = polys[flat];
        double w = phi(p.center, x);
        if (w != 0.0) s += w * eval_poly(p, x);
        std::size_t l = 0;
        for (; l < d; ++l) {
            if (++m[l] <= range[l].second) break;
            m[l] = range[l].first;
        }
        if (l == d) break;
    }
    return s;
}

GlobalApprox global_approx(const DerivativeOracle& f, std::size_t n, std::size_t k) {
    if (n < 1) throw std::invalid_argument("global_approx: n >= 1 required");
    GlobalApprox ga;
    ga.n = n;
    ga.d = f.d;
    std::size_t total = 1;
    for (std::size_t l = 0; l < f.d; ++l) total *= (n + 1);
    ga.polys.reserve(total);
    std::vector<std::size_t> m(f.d, 0);
    for (std::size_t t = 0; t < total; ++t) {
        ga.polys.push_back(taylor_local(f, PoUIndex{m, n, f.d}, k));
        for (std::size_t l = 0; l < f.d; ++l) {
            if (++m[l] <= n) break;
            m[l] = 0;
        }
    }
    return ga;
}

double lp_error(const std::function<double(const Vec&)>& f,
                const std::function<double(const Vec&)>& g, double p, std::size_t d,
                std::size_t pts_per_dim) {
    if (d < 1 || d > 2) throw std::invalid_argument("lp_error: d in {1,2}");
    if (!(p >= 1.0) && !std::isinf(p)) throw std::invalid_argument("lp_error: InvalidP");
    const std::size_t n = pts_per_dim;
    Vec gpts = uniform_grid(0.0, 1.0, n);
    auto w1 = [&](std::size_t i) {
        return ((i == 0 || i == n) ? 0.5 : 1.0) / static_cast<double>(n);
    };
    if (std::isinf(p)) {
        double m = 0.0;
        if (d == 1) {
            for (double x : gpts) m = std::max(m, std::fabs(f({x}) - g({x})));
        } else {
            for (double x : gpts)
                for (double y : gpts) m = std::max(m, std::fabs(f({x, y}) - g({x, y})));
        }
        return m;
    }
    double s = 0.0;
    if (d == 1) {
        for (std::size_t i = 0; i <= n; ++i)
            s += w1(i) * std::pow(std::fabs(f({gpts[i]}) - g({gpts[i]})), p);
    } else {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j <= n; ++j)
                s += w1(i) * w1(j) * std::pow(std::fabs(f({gpts[i], gpts[j]}) - g({gpts[i], gpts[j]})), p);
    }
    return std::pow(s, 1.0 / p);
}

double Bernstein::operator()(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k <= m; ++k)
        s += fv[k] * binom[k] * std::pow(x, static_cast<double>(k)) *
             std::pow(1.0 - x, static_cast<double>(m - k));
    return s;
}

Bernstein bernstein(const std::function<double(double)>& f, std::size_t m) {
    if (m < 1) throw std::invalid_argument("bernstein: m >= 1 required");
    Bernstein b;
    b.m = m;
    b.fv.resize(m + 1);
    b.binom.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        b.fv[k] = f(static_cast<double>(k) / static_cast<double>(m));
        b.binom[k] = binom_coef(m, k);
    }
    return b;
}

SobolevResult approximate_sobolev(const DerivativeOracle& f, std::size_t k, double p, double eps) {
    if (f.d < 1 || f.d > 2)
        throw std::invalid_argument("approximate_sobolev: d in {1,2} supported");
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("approximate_sobolev: eps in (0, 1/2) required");
    const std::size_t d = f.d;

    // grid refinement until the polynomial stage uses up at most 60% of the budget
    SobolevResult res;
    GlobalApprox ga;
    const std::size_t meas = (d == 1) ? 2000 : 220;
    for (std::size_t n = 2;; n *= 2) {
        ga = global_approx(f, n, k);
        res.n = n;
        res.fn_error = lp_error([&](const Vec& x) { return f(x); },
                                [&](const Vec& x) { return ga(x); }, p, d, meas);
        if (res.fn_error <= 0.6 * eps) break;
        if (n >= 64)
            throw std::runtime_error("approximate_sobolev: grid cap reached before 0.6*eps");
    }

    // remaining budget split over the worst-case number of simultaneously
    // active weighted product terms
    double cell_weight = 0.0; // max over cells of sum |c| * factor count
    for (const auto& lp : ga.polys) {
        double s = 0.0;
        for (const auto& [a, c] : lp.coeffs)
            s += std::fabs(c) * static_cast<double>(a.order() + d);
        cell_weight = std::max(cell_weight, s);
    }
    if (cell_weight == 0.0) { // f_n identically zero
        Network z;
        z.kind = Kind::standard;
        z.input_dim = d;
        LinearLayer o;
        o.weights = Mat(1, d);
        o.bias = {0.0};
        o.act.tag = Act::identity;
        z.layers = {std::move(o)};
        res.net = std::move(z);
        res.eps_term = eps;
        res.measured_error = lp_error([&](const Vec& x) { return f(x); },
                                      [&](const Vec& x) { return evaluate(res.net, x)[0]; }, p, d,
                                      meas / 2);
        res.slack = res.measured_error / eps;
        return res;
    }
    double active_cells = std::pow(2.0, static_cast<double>(d));
    res.eps_term = std::min(0.01, 0.5 * eps / (active_cells * cell_weight));

    Network conn = sobolev_network(ga.polys, ga.n, res.eps_term);
    res.net = connected_to_standard(conn);
    res.measured_error = lp_error([&](const Vec& x) { return f(x); },
                                  [&](const Vec& x) { return evaluate(res.net, x)[0]; }, p, d,
                                  (d == 1) ? 1000 : 64);
    res.slack = res.measured_error / eps;
    return res;
}

} // namespace reluforge
