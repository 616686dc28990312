#include "reluforge/selfsimilar.hpp"

#include <cmath>
#include <stdexcept>

#include "reluforge/algebra.hpp"
#include "reluforge/constructions.hpp"

namespace reluforge {

double TakagiSpec::coeff(std::size_t k) const {
    if (k == 0) return 0.0;
    if (!explicit_coeffs.empty())
        return (k <= explicit_coeffs.size()) ? explicit_coeffs[k - 1] : 0.0;
    return std::pow(base, -static_cast<double>(k));
}

double TakagiSpec::tail_bound(std::size_t K) const {
    if (!explicit_coeffs.empty()) return 0.0; // finite sequence
    double b = std::fabs(base);
    return std::pow(b, -static_cast<double>(K)) / (b - 1.0);
}

Network compose_power(const Network& T, std::size_t k) {
    if (T.kind != Kind::standard || T.input_dim != 1 || T.output_dim() != 1)
        throw std::invalid_argument("compose_power: DimensionMismatch");
    if (k < 1) throw std::invalid_argument("compose_power: k >= 1 required");
    Network r = T;
    for (std::size_t i = 1; i < k; ++i) r = compose_merge(T, r);
    return r;
}

namespace {

struct UniformT {
    std::size_t W = 0;                 // padded hidden width
    std::vector<LinearLayer> hidden;   // padded to W rows / W cols (layer 0: 1 col)
    Vec out_w;                         // output row over the W columns
    double out_b = 0.0;
};

UniformT pad_uniform(const Network& T) {
    if (T.kind != Kind::standard || T.input_dim != 1 || T.output_dim() != 1 ||
        T.n_hidden() < 1)
        throw std::invalid_argument("composition sum: univariate standard net with hidden layers required");
    UniformT u;
    for (std::size_t l = 0; l < T.n_hidden(); ++l) u.W = std::max(u.W, T.layers[l].fan_out());
    for (std::size_t l = 0; l < T.n_hidden(); ++l) {
        const LinearLayer& src = T.layers[l];
        if (src.act.tag != Act::relu)
            throw std::invalid_argument("composition sum: hidden activations must be relu");
        LinearLayer L;
        L.weights = Mat(u.W, l == 0 ? 1 : u.W);
        L.bias.assign(u.W, 0.0);
        L.act.tag = Act::relu;
        L.weights.put_block(0, 0, src.weights);
        for (std::size_t r = 0; r < src.fan_out(); ++r) L.bias[r] = src.bias[r];
        u.hidden.push_back(std::move(L));
    }
    const LinearLayer& o = T.layers.back();
    u.out_w.assign(u.W, 0.0);
    for (std::size_t c = 0; c < o.fan_in(); ++c) u.out_w[c] = o.weights(0, c);
    u.out_b = o.bias[0];
    return u;
}

} // namespace

Network weighted_composition_sum(const Network& T, const Vec& a) {
    if (a.empty()) throw std::invalid_argument("weighted_composition_sum: no coefficients");
    UniformT u = pad_uniform(T);
    const std::size_t m = a.size();
    const std::size_t L = u.hidden.size();
    const std::size_t W = u.W + 2; // source + compute lane + collation
    const std::size_t coll = W - 1;

    Network net;
    net.kind = Kind::special;
    net.input_dim = 1;
    for (std::size_t b = 0; b < m; ++b) {
        for (std::size_t l = 0; l < L; ++l) {
            LinearLayer nl;
            nl.weights = Mat(W, (b == 0 && l == 0) ? 1 : W);
            nl.bias.assign(W, 0.0);
            nl.act.tag = Act::relu;
            nl.weights(0, 0) = 1.0; // source carry (reads x at the very first layer)
            const LinearLayer& tl = u.hidden[l];
            if (l == 0) {
                if (b == 0) {
                    for (std::size_t r = 0; r < u.W; ++r) {
                        nl.weights(r + 1, 0) = tl.weights(r, 0);
                        nl.bias[r + 1] = tl.bias[r];
                    }
                } else {
                    // seam: T's first layer merged with the previous block's output row
                    for (std::size_t r = 0; r < u.W; ++r) {
                        for (std::size_t c = 0; c < u.W; ++c)
                            nl.weights(r + 1, c + 1) = tl.weights(r, 0) * u.out_w[c];
                        nl.bias[r + 1] = tl.bias[r] + tl.weights(r, 0) * u.out_b;
                    }
                    // collation picks up a_b * T^(b) from the finished block
                    nl.weights(coll, coll) = 1.0;
                    for (std::size_t c = 0; c < u.W; ++c)
                        nl.weights(coll, c + 1) = a[b - 1] * u.out_w[c];
                    nl.bias[coll] = a[b - 1] * u.out_b;
                }
            } else {
                for (std::size_t r = 0; r < u.W; ++r) {
                    for (std::size_t c = 0; c < u.W; ++c)
                        nl.weights(r + 1, c + 1) = tl.weights(r, c);
                    nl.bias[r + 1] = tl.bias[r];
                }
                nl.weights(coll, coll) = 1.0;
            }
            net.layers.push_back(std::move(nl));
            net.channel_meta.source.push_back(0);
            net.channel_meta.collation.push_back(coll);
        }
    }
    LinearLayer out;
    out.weights = Mat(1, W);
    out.bias = {a[m - 1] * u.out_b};
    out.act.tag = Act::identity;
    out.weights(0, coll) = 1.0;
    for (std::size_t c = 0; c < u.W; ++c) out.weights(0, c + 1) = a[m - 1] * u.out_w[c];
    net.layers.push_back(std::move(out));
    require_valid(net);
    return net;
}

Network weighted_g_composition_sum(const Network& T, const Network& g, const Vec& a) {
    if (a.empty()) throw std::invalid_argument("weighted_g_composition_sum: no coefficients");
    UniformT ut = pad_uniform(T);
    UniformT ug = pad_uniform(g);
    if (ut.hidden.size() != ug.hidden.size())
        throw std::invalid_argument("weighted_g_composition_sum: DimensionMismatch (depths differ)");
    const std::size_t m = a.size();
    const std::size_t L = ut.hidden.size();
    const std::size_t W = ut.W + ug.W + 2;
    const std::size_t toff = 1, goff = 1 + ut.W, coll = W - 1;

    Network net;
    net.kind = Kind::special;
    net.input_dim = 1;
    // blocks 0..m: T-lane computes T^(b+1) in blocks 0..m-1; g-lane computes
    // g(T^(b)) in blocks 1..m; collation collects a_b g(T^(b)) at later seams
    for (std::size_t b = 0; b <= m; ++b) {
        for (std::size_t l = 0; l < L; ++l) {
            LinearLayer nl;
            nl.weights = Mat(W, (b == 0 && l == 0) ? 1 : W);
            nl.bias.assign(W, 0.0);
            nl.act.tag = Act::relu;
            nl.weights(0, 0) = 1.0;
            if (l == 0) {
                if (b == 0) {
                    for (std::size_t r = 0; r < ut.W; ++r) {
                        nl.weights(toff + r, 0) = ut.hidden[0].weights(r, 0);
                        nl.bias[toff + r] = ut.hidden[0].bias[r];
                    }
                } else {
                    if (b < m) { // T-lane seam: next power
                        for (std::size_t r = 0; r < ut.W; ++r) {
                            for (std::size_t c = 0; c < ut.W; ++c)
                                nl.weights(toff + r, toff + c) =
                                    ut.hidden[0].weights(r, 0) * ut.out_w[c];
                            nl.bias[toff + r] =
                                ut.hidden[0].bias[r] + ut.hidden[0].weights(r, 0) * ut.out_b;
                        }
                    }
                    // g-lane seam: feed T^(b) into g
                    for (std::size_t r = 0; r < ug.W; ++r) {
                        for (std::size_t c = 0; c < ut.W; ++c)
                            nl.weights(goff + r, toff + c) =
                                ug.hidden[0].weights(r, 0) * ut.out_w[c];
                        nl.bias[goff + r] =
                            ug.hidden[0].bias[r] + ug.hidden[0].weights(r, 0) * ut.out_b;
                    }
                    nl.weights(coll, coll) = 1.0;
                    if (b >= 2) { // collect a_{b-1} g(T^(b-1)) from the g-lane
                        for (std::size_t c = 0; c < ug.W; ++c)
                            nl.weights(coll, goff + c) = a[b - 2] * ug.out_w[c];
                        nl.bias[coll] = a[b - 2] * ug.out_b;
                    }
                }
            } else {
                if (b < m)
                    for (std::size_t r = 0; r < ut.W; ++r) {
                        for (std::size_t c = 0; c < ut.W; ++c)
                            nl.weights(toff + r, toff + c) = ut.hidden[l].weights(r, c);
                        nl.bias[toff + r] = ut.hidden[l].bias[r];
                    }
                if (b >= 1)
                    for (std::size_t r = 0; r < ug.W; ++r) {
                        for (std::size_t c = 0; c < ug.W; ++c)
                            nl.weights(goff + r, goff + c) = ug.hidden[l].weights(r, c);
                        nl.bias[goff + r] = ug.hidden[l].bias[r];
                    }
                nl.weights(coll, coll) = 1.0;
            }
            net.layers.push_back(std::move(nl));
            net.channel_meta.source.push_back(0);
            net.channel_meta.collation.push_back(coll);
        }
    }
    LinearLayer out;
    out.weights = Mat(1, W);
    out.bias = {a[m - 1] * ug.out_b};
    out.act.tag = Act::identity;
    out.weights(0, coll) = 1.0;
    for (std::size_t c = 0; c < ug.W; ++c) out.weights(0, goff + c) = a[m - 1] * ug.out_w[c];
    net.layers.push_back(std::move(out));
    require_valid(net);
    return net;
}

Network takagi_network(const TakagiSpec& spec) {
    if (spec.depth < 1) throw std::invalid_argument("takagi_network: depth >= 1 required");
    if (spec.explicit_coeffs.empty() && !(std::fabs(spec.base) > 1.0))
        throw std::invalid_argument("takagi_network: geometric rule needs |base| > 1");
    Vec a(spec.depth);
    for (std::size_t k = 1; k <= spec.depth; ++k) a[k - 1] = spec.coeff(k);
    // width 2 hat + source + collation = the width-4 construction
    return weighted_composition_sum(hat_network_m21(), a);
}

double takagi_reference(const TakagiSpec& spec, double x, std::size_t K) {
    if (K < spec.depth)
        throw std::invalid_argument("takagi_reference: K >= spec.depth required");
    double t = x, s = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        t = (t <= 0.5) ? 2.0 * t : 2.0 * (1.0 - t);
        s += spec.coeff(k) * t;
    }
    return s;
}

RateFit rate_fit(const std::vector<std::pair<std::size_t, double>>& errors) {
    if (errors.size() < 4) throw std::invalid_argument("rate_fit: DegenerateFit (need >= 4 points)");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(errors.size());
    for (const auto& [depth, err] : errors) {
        if (!(err > 0.0)) throw std::invalid_argument("rate_fit: DegenerateFit (non-positive error)");
        double x = static_cast<double>(depth), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("rate_fit: DegenerateFit");
    double slope = (n * sxy - sx * sy) / denom;
    double icept = (sy - slope * sx) / n;
    RateFit f;
    f.base = std::exp(-slope);
    f.C = std::exp(icept);
    double rss = 0.0;
    for (const auto& [depth, err] : errors) {
        double r = std::log(err) - (icept + slope * static_cast<double>(depth));
        rss += r * r;
    }
    f.residual = std::sqrt(rss / n);
    return f;
}

} // namespace reluforge
