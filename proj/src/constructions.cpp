#include "reluforge/constructions.hpp"

#include <cmath>
#include <stdexcept>

#include "reluforge/algebra.hpp"
#include "reluforge/grid.hpp"

namespace reluforge {

SquarerSpec squarer_from_eps(double eps) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("squarer_from_eps: eps in (0, 1/2) required");
    SquarerSpec s;
    s.m = static_cast<std::size_t>(std::max(1.0, std::ceil(0.5 * std::log2(1.0 / eps))));
    s.target_eps = eps;
    return s;
}

Network hat_network() {
    Network net;
    net.kind = Kind::standard;
    net.input_dim = 1;
    LinearLayer h;
    h.weights = Mat(3, 1);
    h.weights(0, 0) = h.weights(1, 0) = h.weights(2, 0) = 1.0;
    h.bias = {0.0, -0.5, -1.0};
    h.act.tag = Act::relu;
    LinearLayer out;
    out.weights = Mat(1, 3);
    out.weights(0, 0) = 2.0;
    out.weights(0, 1) = -4.0;
    out.weights(0, 2) = 2.0;
    out.bias = {0.0};
    out.act.tag = Act::identity;
    net.layers = {std::move(h), std::move(out)};
    return net;
}

Network hat_network_m21() {
    // H(x) = 2 sigma(x) - 4 sigma(x - 1/2); equals the hat on [0,1]
    Network net;
    net.kind = Kind::standard;
    net.input_dim = 1;
    LinearLayer h;
    h.weights = Mat(2, 1);
    h.weights(0, 0) = h.weights(1, 0) = 1.0;
    h.bias = {0.0, -0.5};
    h.act.tag = Act::relu;
    LinearLayer out;
    out.weights = Mat(1, 2);
    out.weights(0, 0) = 2.0;
    out.weights(0, 1) = -4.0;
    out.bias = {0.0};
    out.act.tag = Act::identity;
    net.layers = {std::move(h), std::move(out)};
    return net;
}

Network sawtooth_network(std::size_t s) {
    if (s < 1) throw std::invalid_argument("sawtooth_network: s >= 1 required");
    Network net;
    net.kind = Kind::standard;
    net.input_dim = 1;
    LinearLayer first;
    first.weights = Mat(3, 1);
    first.weights(0, 0) = first.weights(1, 0) = first.weights(2, 0) = 1.0;
    first.bias = {0.0, -0.5, -1.0};
    first.act.tag = Act::relu;
    net.layers.push_back(std::move(first));
    for (std::size_t l = 2; l <= s; ++l) {
        LinearLayer mid;
        mid.weights = Mat(3, 3);
        for (std::size_t r = 0; r < 3; ++r) {
            mid.weights(r, 0) = 2.0;
            mid.weights(r, 1) = -4.0;
            mid.weights(r, 2) = 2.0;
        }
        mid.bias = {0.0, -0.5, -1.0};
        mid.act.tag = Act::relu;
        net.layers.push_back(std::move(mid));
    }
    LinearLayer out;
    out.weights = Mat(1, 3);
    out.weights(0, 0) = 2.0;
    out.weights(0, 1) = -4.0;
    out.weights(0, 2) = 2.0;
    out.bias = {0.0};
    out.act.tag = Act::identity;
    net.layers.push_back(std::move(out));
    return net;
}

Network squarer_network(const SquarerSpec& spec) {
    const std::size_t m = spec.m;
    if (m < 1) throw std::invalid_argument("squarer_network: m >= 1 required");
    Network net;
    net.kind = Kind::standard;
    net.input_dim = 1;

    LinearLayer first; // (sigma x, sigma(x-1/2), sigma(x-1), x) on [0,1]
    first.weights = Mat(4, 1);
    for (std::size_t r = 0; r < 4; ++r) first.weights(r, 0) = 1.0;
    first.bias = {0.0, -0.5, -1.0, 0.0};
    first.act.tag = Act::relu;
    net.layers.push_back(std::move(first));

    for (std::size_t l = 2; l <= m; ++l) {
        LinearLayer mid;
        mid.weights = Mat(4, 4);
        for (std::size_t r = 0; r < 3; ++r) {
            mid.weights(r, 0) = 0.5;
            mid.weights(r, 1) = -1.0;
            mid.weights(r, 2) = 0.5;
        }
        mid.weights(3, 0) = -0.5;
        mid.weights(3, 1) = 1.0;
        mid.weights(3, 2) = -0.5;
        mid.weights(3, 3) = 1.0;
        mid.bias = {0.0, -std::pow(2.0, 1.0 - 2.0 * static_cast<double>(l)),
                    -std::pow(2.0, 2.0 - 2.0 * static_cast<double>(l)), 0.0};
        mid.act.tag = Act::relu;
        net.layers.push_back(std::move(mid));
    }

    LinearLayer out; // g_m = x - sum h_s / 4^s
    out.weights = Mat(1, 4);
    out.weights(0, 0) = -0.5;
    out.weights(0, 1) = 1.0;
    out.weights(0, 2) = -0.5;
    out.weights(0, 3) = 1.0;
    out.bias = {0.0};
    out.act.tag = Act::identity;
    net.layers.push_back(std::move(out));
    return net;
}

namespace {

Network build_multiplier(double D, double delta) {
    std::size_t m = static_cast<std::size_t>(
        std::max(1.0, std::ceil(0.5 * std::log2(1.0 / delta))));
    const double s = 1.0 / (2.0 * D);

    Network net;
    net.kind = Kind::standard;
    net.input_dim = 2;

    // |x+y|, |x|, |y| halves, prescaled by 1/(2D)
    LinearLayer abs_layer;
    abs_layer.weights = Mat(6, 2);
    abs_layer.bias.assign(6, 0.0);
    abs_layer.act.tag = Act::relu;
    abs_layer.weights(0, 0) = s;  abs_layer.weights(0, 1) = s;
    abs_layer.weights(1, 0) = -s; abs_layer.weights(1, 1) = -s;
    abs_layer.weights(2, 0) = s;
    abs_layer.weights(3, 0) = -s;
    abs_layer.weights(4, 1) = s;
    abs_layer.weights(5, 1) = -s;
    net.layers.push_back(std::move(abs_layer));

    Network sq = squarer_network({m, delta});
    // three squarer copies in parallel; copy c's first layer reads sigma-pair 2c,2c+1
    {
        LinearLayer l1;
        l1.weights = Mat(12, 6);
        l1.bias.assign(12, 0.0);
        l1.act.tag = Act::relu;
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t r = 0; r < 4; ++r) {
                l1.weights(4 * c + r, 2 * c) = 1.0;
                l1.weights(4 * c + r, 2 * c + 1) = 1.0;
                l1.bias[4 * c + r] = sq.layers[0].bias[r];
            }
        net.layers.push_back(std::move(l1));
    }
    for (std::size_t l = 1; l + 1 < sq.layers.size(); ++l) {
        LinearLayer mid;
        mid.weights = Mat(12, 12);
        mid.bias.assign(12, 0.0);
        mid.act.tag = Act::relu;
        for (std::size_t c = 0; c < 3; ++c) {
            mid.weights.put_block(4 * c, 4 * c, sq.layers[l].weights);
            for (std::size_t r = 0; r < 4; ++r) mid.bias[4 * c + r] = sq.layers[l].bias[r];
        }
        net.layers.push_back(std::move(mid));
    }
    // Interleave the last hidden layer as (+,x,y) triples so the output's
    // left-to-right accumulation cancels term by term on the axes: with y = 0
    // (or x = 0) each triple sums to an exact 0, giving a bit-zero product.
    {
        LinearLayer& last = net.layers.back();
        LinearLayer perm;
        perm.weights = Mat(12, last.fan_in());
        perm.bias.assign(12, 0.0);
        perm.act = last.act;
        for (std::size_t j = 0; j < 12; ++j) {
            std::size_t old = (j % 3) * 4 + j / 3;
            for (std::size_t k = 0; k < last.fan_in(); ++k)
                perm.weights(j, k) = last.weights(old, k);
            perm.bias[j] = last.bias[old];
        }
        last = std::move(perm);
    }
    LinearLayer out; // 2D^2 (Phi(|x+y|/2D) - Phi(|x|/2D) - Phi(|y|/2D))
    out.weights = Mat(1, 12);
    out.bias = {0.0};
    out.act.tag = Act::identity;
    const double coef[3] = {2.0 * D * D, -2.0 * D * D, -2.0 * D * D};
    const LinearLayer& sqout = sq.layers.back();
    for (std::size_t j = 0; j < 12; ++j)
        out.weights(0, j) = coef[j % 3] * sqout.weights(0, j / 3);
    net.layers.push_back(std::move(out));
    return net;
}

} // namespace

Network multiplier_network(MultiplierSpec& spec) {
    if (spec.D < 1.0) throw std::invalid_argument("multiplier_network: D >= 1 required");
    if (!(spec.eps > 0.0 && spec.eps < 0.5))
        throw std::invalid_argument("multiplier_network: eps in (0, 1/2) required");
    if (spec.C0 <= 0.0) spec.C0 = 1.0;
    double delta = spec.eps / (6.0 * spec.D * spec.D * spec.C0);
    Network net;
    for (int attempt = 0; attempt <= 6; ++attempt) {
        net = build_multiplier(spec.D, delta);
        // empirical check of the eps bound on a 500x500 grid
        double worst = 0.0;
        Vec g = uniform_grid(-spec.D, spec.D, 499);
        bool ok = true;
        for (double x : g) {
            for (double y : g) {
                double e = std::fabs(evaluate(net, {x, y})[0] - x * y);
                if (e > worst) worst = e;
                if (worst > spec.eps) { ok = false; break; }
            }
            if (!ok) break;
        }
        if (ok) break;
        delta *= 0.5; // tighten and retry (bounded)
        if (attempt == 6)
            throw std::runtime_error("multiplier_network: eps bound not met after 6 tightenings");
    }
    spec.delta = delta;
    return net;
}

Network product_network(const Network& base, double eps) {
    const std::size_t m = base.output_dim();
    if (m == 0) throw std::invalid_argument("product_network: base has no outputs");
    if (m == 1) return base;
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("product_network: eps in (0, 1/2) required");
    if (static_cast<double>(m) * eps > 1.0)
        throw std::invalid_argument("product_network: m*eps must stay <= 1 for the D=2 range");

    // spot-check the |Phi_i| <= 1 precondition on a coarse cube grid
    const std::size_t d = base.input_dim;
    if (d <= 3) {
        std::size_t gn = (d <= 2) ? 16 : 6;
        for (const auto& x : cube_grid(d, gn)) {
            Vec y = evaluate(base, x);
            for (double v : y)
                if (std::fabs(v) > 1.0 + 1e-9)
                    throw FactorOutOfRange("product_network: factor exceeds [-1,1] on the cube");
        }
    }

    Network bc = as_connected(base);
    const LinearLayer& bout = bc.layers.back();

    // Psi_1 = first output only
    Network psi = bc;
    {
        LinearLayer o;
        o.weights = Mat(1, bout.fan_in());
        for (std::size_t k = 0; k < bout.fan_in(); ++k) o.weights(0, k) = bout.weights(0, k);
        o.bias = {bout.bias[0]};
        o.act.tag = Act::identity;
        psi.layers.back() = std::move(o);
    }

    for (std::size_t i = 1; i < m; ++i) {
        // Psi~ = (Psi_{i-1}, Phi_i); the base history is a prefix of psi's history
        Network tilde = psi;
        const LinearLayer& po = psi.layers.back();
        LinearLayer o;
        o.weights = Mat(2, po.fan_in());
        o.bias = {po.bias[0], bout.bias[i]};
        o.act.tag = Act::identity;
        for (std::size_t k = 0; k < po.fan_in(); ++k) o.weights(0, k) = po.weights(0, k);
        for (std::size_t k = 0; k < bout.fan_in(); ++k) o.weights(1, k) = bout.weights(i, k);
        tilde.layers.back() = std::move(o);

        MultiplierSpec ms;
        ms.D = 2.0;
        ms.eps = eps;
        Network mult = multiplier_network(ms);
        psi = compose(mult, tilde);
    }
    return psi;
}

Network pou_scalar_network(std::size_t i, const PoUIndex& idx) {
    if (i >= idx.d || idx.m.size() != idx.d || idx.n < 1 || idx.m[i] > idx.n)
        throw std::invalid_argument("pou_scalar_network: bad PoUIndex");
    Network net;
    net.kind = Kind::standard;
    net.input_dim = 1;
    const double n3 = 3.0 * static_cast<double>(idx.n);
    const double c = 3.0 * static_cast<double>(idx.m[i]);
    const double t[4] = {2.0, 1.0, -1.0, -2.0};
    LinearLayer h;
    h.weights = Mat(4, 1);
    h.bias.assign(4, 0.0);
    h.act.tag = Act::relu;
    for (std::size_t r = 0; r < 4; ++r) {
        h.weights(r, 0) = n3;
        h.bias[r] = t[r] - c;
    }
    LinearLayer out;
    out.weights = Mat(1, 4);
    out.weights(0, 0) = 1.0;
    out.weights(0, 1) = -1.0;
    out.weights(0, 2) = -1.0;
    out.weights(0, 3) = 1.0;
    out.bias = {0.0};
    out.act.tag = Act::identity;
    net.layers = {std::move(h), std::move(out)};
    return net;
}

Network pou_network(const PoUIndex& idx) {
    if (idx.m.size() != idx.d || idx.d < 1 || idx.n < 1)
        throw std::invalid_argument("pou_network: bad PoUIndex");
    for (auto mi : idx.m)
        if (mi > idx.n) throw std::invalid_argument("pou_network: m component out of range");
    const std::size_t d = idx.d;
    Network net;
    net.kind = Kind::standard;
    net.input_dim = d;
    const double n3 = 3.0 * static_cast<double>(idx.n);
    const double t[4] = {2.0, 1.0, -1.0, -2.0};
    LinearLayer h;
    h.weights = Mat(4 * d, d);
    h.bias.assign(4 * d, 0.0);
    h.act.tag = Act::relu;
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t r = 0; r < 4; ++r) {
            h.weights(4 * l + r, l) = n3;
            h.bias[4 * l + r] = t[r] - 3.0 * static_cast<double>(idx.m[l]);
        }
    LinearLayer out;
    out.weights = Mat(d, 4 * d);
    out.bias.assign(d, 0.0);
    out.act.tag = Act::identity;
    for (std::size_t l = 0; l < d; ++l) {
        out.weights(l, 4 * l + 0) = 1.0;
        out.weights(l, 4 * l + 1) = -1.0;
        out.weights(l, 4 * l + 2) = -1.0;
        out.weights(l, 4 * l + 3) = 1.0;
    }
    net.layers = {std::move(h), std::move(out)};
    return net;
}

Network monomial_selector(const MultiIndex& alpha, std::size_t d) {
    if (alpha.a.size() != d) throw std::invalid_argument("monomial_selector: alpha length != d");
    Network net;
    net.kind = Kind::standard;
    net.input_dim = d;
    const std::size_t k = alpha.order();
    LinearLayer out;
    out.act.tag = Act::identity;
    if (k == 0) { // empty product convention: constant 1
        out.weights = Mat(1, d);
        out.bias = {1.0};
    } else {
        out.weights = Mat(k, d);
        out.bias.assign(k, 0.0);
        std::size_t r = 0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t rep = 0; rep < alpha.a[i]; ++rep) out.weights(r++, i) = 1.0;
    }
    net.layers = {std::move(out)};
    return net;
}

Network sobolev_network(const std::vector<LocalPolynomial>& local_polys, std::size_t n,
                        double eps) {
    (void)n;
    std::vector<Network> terms;
    Vec coeffs;
    for (const auto& lp : local_polys) {
        for (const auto& [alpha, c] : lp.coeffs) {
            if (c == 0.0) continue;
            Network pou = pou_network(lp.center);
            Network base =
                alpha.order() == 0 ? pou : concat(monomial_selector(alpha, lp.center.d), pou);
            terms.push_back(product_network(base, eps));
            coeffs.push_back(c);
        }
    }
    if (terms.empty()) throw std::invalid_argument("sobolev_network: EmptyIndexSet");

    Network big = concat_many(terms);
    Network sum;
    sum.kind = Kind::standard;
    sum.input_dim = big.output_dim();
    LinearLayer s;
    s.weights = Mat(1, coeffs.size());
    for (std::size_t t = 0; t < coeffs.size(); ++t) s.weights(0, t) = coeffs[t];
    s.bias = {0.0};
    s.act.tag = Act::identity;
    sum.layers = {std::move(s)};
    return compose(sum, big);
}

} // namespace reluforge
