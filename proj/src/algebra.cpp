#include "reluforge/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "reluforge/grid.hpp"

namespace reluforge {

namespace {

std::vector<std::size_t> seg_sizes(const Network& c) {
    // history segments of a connected net: input, then each non-output layer
    std::vector<std::size_t> s{c.input_dim};
    for (std::size_t l = 0; l + 1 < c.layers.size(); ++l)
        s.push_back(c.layers[l].fan_out());
    return s;
}

std::vector<std::size_t> seg_offsets(const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> off(sizes.size() + 1, 0);
    for (std::size_t i = 0; i < sizes.size(); ++i) off[i + 1] = off[i] + sizes[i];
    return off;
}

void no_special(const Network& n, const char* op) {
    if (n.kind == Kind::special)
        throw std::invalid_argument(std::string(op) +
                                    ": convert special networks with special_to_standard first");
}

} // namespace

Network identity_network(std::size_t d) {
    if (d < 1) throw std::invalid_argument("identity_network: d >= 1 required");
    Network net;
    net.kind = Kind::standard;
    net.input_dim = d;
    LinearLayer h;
    h.weights = Mat(2 * d, d);
    h.bias.assign(2 * d, 0.0);
    h.act.tag = Act::relu;
    for (std::size_t i = 0; i < d; ++i) {
        h.weights(i, i) = 1.0;
        h.weights(d + i, i) = -1.0;
    }
    LinearLayer out;
    out.weights = Mat(d, 2 * d);
    out.bias.assign(d, 0.0);
    out.act.tag = Act::identity;
    for (std::size_t i = 0; i < d; ++i) {
        out.weights(i, i) = 1.0;
        out.weights(i, d + i) = -1.0;
    }
    net.layers = {std::move(h), std::move(out)};
    return net;
}

Network as_connected(const Network& net) {
    if (net.kind == Kind::connected) return net;
    no_special(net, "as_connected");
    Network c;
    c.kind = Kind::connected;
    c.input_dim = net.input_dim;
    auto sizes = seg_sizes(net);
    auto off = seg_offsets(sizes);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LinearLayer& L = net.layers[l];
        LinearLayer nl;
        nl.weights = Mat(L.fan_out(), off[l + 1]);
        nl.weights.put_block(0, off[l], L.weights);
        nl.bias = L.bias;
        nl.act = L.act;
        c.layers.push_back(std::move(nl));
    }
    return c;
}

Network compose(const Network& outer0, const Network& inner0) {
    no_special(outer0, "compose");
    no_special(inner0, "compose");
    if (outer0.input_dim != inner0.output_dim())
        throw std::invalid_argument("compose: DimensionMismatch");
    Network inner = as_connected(inner0);
    Network outer = as_connected(outer0);
    const std::size_t p = inner.output_dim();
    const std::size_t Ki = inner.layers.size();

    Network res;
    res.kind = Kind::connected;
    res.input_dim = inner.input_dim;
    for (std::size_t l = 0; l + 1 < Ki; ++l) res.layers.push_back(inner.layers[l]);

    // duplicate the inner output layer as +/- ReLU pairs
    const LinearLayer& iout = inner.layers.back();
    LinearLayer dup;
    dup.weights = Mat(2 * p, iout.fan_in());
    dup.bias.assign(2 * p, 0.0);
    dup.act.tag = Act::relu;
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t k = 0; k < iout.fan_in(); ++k) {
            dup.weights(r, k) = iout.weights(r, k);
            dup.weights(p + r, k) = -iout.weights(r, k);
        }
        dup.bias[r] = iout.bias[r];
        dup.bias[p + r] = -iout.bias[r];
    }
    res.layers.push_back(std::move(dup));

    // result history: [x, inner hidden..., dup, outer hidden...]
    std::vector<std::size_t> rsz{res.input_dim};
    for (auto& L : res.layers) rsz.push_back(L.fan_out());
    const std::size_t dup_off = seg_offsets(rsz)[rsz.size() - 1];

    auto osz = seg_sizes(outer); // [p, outer hidden...]
    auto ooff = seg_offsets(osz);
    for (std::size_t l = 0; l < outer.layers.size(); ++l) {
        const LinearLayer& L = outer.layers[l];
        auto roff = seg_offsets(rsz);
        LinearLayer nl;
        nl.weights = Mat(L.fan_out(), roff.back());
        nl.bias = L.bias;
        nl.act = L.act;
        for (std::size_t r = 0; r < L.fan_out(); ++r) {
            for (std::size_t k = 0; k < p; ++k) { // outer input block -> dup pairs
                double w = L.weights(r, ooff[0] + k);
                if (w == 0.0) continue;
                nl.weights(r, dup_off + k) = w;
                nl.weights(r, dup_off + p + k) = -w;
            }
            for (std::size_t i = 1; i <= l && i < osz.size(); ++i) {
                std::size_t base = roff[Ki + i]; // outer hidden seg i lives after dup
                for (std::size_t k = 0; k < osz[i]; ++k)
                    nl.weights(r, base + k) = L.weights(r, ooff[i] + k);
            }
        }
        res.layers.push_back(std::move(nl));
        rsz.push_back(res.layers.back().fan_out());
    }
    return res;
}

Network compose_merge(const Network& outer, const Network& inner) {
    if (outer.kind != Kind::standard || inner.kind != Kind::standard)
        throw std::invalid_argument("compose_merge: both networks must be standard");
    if (outer.input_dim != inner.output_dim())
        throw std::invalid_argument("compose_merge: DimensionMismatch");
    Network res;
    res.kind = Kind::standard;
    res.input_dim = inner.input_dim;
    for (std::size_t l = 0; l + 1 < inner.layers.size(); ++l)
        res.layers.push_back(inner.layers[l]);
    const LinearLayer& iout = inner.layers.back();
    const LinearLayer& o0 = outer.layers.front();
    LinearLayer seam;
    seam.weights = matmul(o0.weights, iout.weights);
    seam.bias = matvec(o0.weights, iout.bias);
    for (std::size_t r = 0; r < seam.bias.size(); ++r) seam.bias[r] += o0.bias[r];
    seam.act = o0.act;
    res.layers.push_back(std::move(seam));
    for (std::size_t l = 1; l < outer.layers.size(); ++l) res.layers.push_back(outer.layers[l]);
    return res;
}

Network concat_many(const std::vector<Network>& nets0) {
    if (nets0.empty()) throw std::invalid_argument("concat_many: empty list");
    std::vector<Network> nets;
    nets.reserve(nets0.size());
    for (const auto& n : nets0) {
        no_special(n, "concat");
        nets.push_back(as_connected(n));
        if (nets.back().input_dim != nets.front().input_dim)
            throw std::invalid_argument("concat: DimensionMismatch (input dims differ)");
    }
    const std::size_t d = nets.front().input_dim;
    const std::size_t J = nets.size();
    std::size_t K = 0;
    for (const auto& n : nets) K = std::max(K, n.layers.size());

    // result segment layout: seg 0 = shared input; seg l+1 stacks the layer-l
    // outputs of every net that still has hidden layer l
    // col_of[j][i] = result column of net j's segment i
    std::vector<std::vector<std::size_t>> col_of(J);
    for (std::size_t j = 0; j < J; ++j) col_of[j].assign(nets[j].layers.size() + 1, 0);
    std::size_t total_cols = d;
    for (std::size_t l = 0; l + 1 < K; ++l) {
        for (std::size_t j = 0; j < J; ++j)
            if (l + 1 < nets[j].layers.size()) {
                col_of[j][l + 1] = total_cols;
                total_cols += nets[j].layers[l].fan_out();
            }
    }

    Network res;
    res.kind = Kind::connected;
    res.input_dim = d;
    std::size_t hist = d;
    for (std::size_t l = 0; l < K; ++l) {
        const bool is_out = (l + 1 == K);
        std::size_t rows = 0;
        for (std::size_t j = 0; j < J; ++j) {
            if (is_out)
                rows += nets[j].output_dim();
            else if (l + 1 < nets[j].layers.size())
                rows += nets[j].layers[l].fan_out();
        }
        LinearLayer nl;
        nl.weights = Mat(rows, hist);
        nl.bias.assign(rows, 0.0);
        nl.act.tag = is_out ? Act::identity : Act::relu;
        std::size_t r0 = 0;
        for (std::size_t j = 0; j < J; ++j) {
            const Network& nj = nets[j];
            std::size_t src_layer;
            if (is_out)
                src_layer = nj.layers.size() - 1;
            else if (l + 1 < nj.layers.size())
                src_layer = l;
            else
                continue;
            const LinearLayer& L = nj.layers[src_layer];
            if (!is_out && L.act.tag != Act::relu)
                throw std::invalid_argument("concat: hidden activations must be ReLU");
            auto osz = seg_sizes(nj);
            auto ooff = seg_offsets(osz);
            for (std::size_t r = 0; r < L.fan_out(); ++r) {
                nl.bias[r0 + r] = L.bias[r];
                for (std::size_t i = 0; i <= src_layer && i < osz.size(); ++i) {
                    std::size_t base = (i == 0) ? 0 : col_of[j][i];
                    for (std::size_t k = 0; k < osz[i]; ++k)
                        nl.weights(r0 + r, base + k) = L.weights(r, ooff[i] + k);
                }
            }
            r0 += L.fan_out();
        }
        hist += rows;
        res.layers.push_back(std::move(nl));
    }
    return res;
}

Network concat(const Network& a, const Network& b) { return concat_many({a, b}); }

Network connected_to_standard(const Network& c0) {
    if (c0.kind == Kind::standard) return c0;
    if (c0.kind != Kind::connected)
        throw std::invalid_argument("connected_to_standard: expects a connected network");
    const Network& c = c0;
    const std::size_t K = c.layers.size();
    const std::size_t d = c.input_dim;
    if (K == 1) {
        Network r = c;
        r.kind = Kind::standard;
        return r;
    }
    for (std::size_t l = 0; l + 1 < K; ++l)
        if (c.layers[l].act.tag != Act::relu)
            throw std::invalid_argument(
                "connected_to_standard: hidden activations must be ReLU (carried values rely on it)");

    auto sizes = seg_sizes(c);
    auto off = seg_offsets(sizes);
    const std::size_t S = sizes.size(); // segments 0..S-1

    // last layer (index) that reads each segment; segment i first exists before layer i
    std::vector<long long> last_use(S, -1);
    for (std::size_t l = 0; l < K; ++l) {
        const Mat& W = c.layers[l].weights;
        for (std::size_t i = 0; i <= l && i < S; ++i) {
            bool used = false;
            for (std::size_t r = 0; r < W.rows && !used; ++r)
                for (std::size_t k = off[i]; k < off[i + 1]; ++k)
                    if (W(r, k) != 0.0) { used = true; break; }
            if (used) last_use[i] = static_cast<long long>(l);
        }
    }

    struct Item {
        std::size_t seg, idx;
        int sign; // +1/-1: input pair halves; 0: direct nonnegative carry
    };
    std::vector<Item> state;

    Network res;
    res.kind = Kind::standard;
    res.input_dim = d;

    for (std::size_t l = 0; l < K; ++l) {
        const LinearLayer& L = c.layers[l];
        const bool is_out = (l + 1 == K);

        std::vector<Item> carried;
        if (!is_out) {
            if (l == 0) {
                if (last_use[0] > 0)
                    for (int s : {+1, -1})
                        for (std::size_t k = 0; k < d; ++k) carried.push_back({0, k, s});
            } else {
                for (const Item& it : state)
                    if (last_use[it.seg] > static_cast<long long>(l)) carried.push_back(it);
            }
        }

        const std::size_t fan_in = (l == 0) ? d : state.size();
        LinearLayer nl;
        nl.weights = Mat(carried.size() + L.fan_out(), fan_in);
        nl.bias.assign(nl.weights.rows, 0.0);
        nl.act.tag = is_out ? Act::identity : Act::relu;

        auto col_of = [&](std::size_t seg, std::size_t idx, int sign) -> std::size_t {
            for (std::size_t t = 0; t < state.size(); ++t)
                if (state[t].seg == seg && state[t].idx == idx && state[t].sign == sign)
                    return t;
            throw std::logic_error("connected_to_standard: missing carried value");
        };

        // carry rows
        for (std::size_t t = 0; t < carried.size(); ++t) {
            const Item& it = carried[t];
            if (l == 0)
                nl.weights(t, it.idx) = static_cast<double>(it.sign); // sigma(+/- x)
            else
                nl.weights(t, col_of(it.seg, it.idx, it.sign)) = 1.0;
        }

        // compute rows
        for (std::size_t r = 0; r < L.fan_out(); ++r) {
            std::size_t rr = carried.size() + r;
            nl.bias[rr] = L.bias[r];
            for (std::size_t i = 0; i <= l && i < S; ++i) {
                for (std::size_t k = 0; k < sizes[i]; ++k) {
                    double w = L.weights(r, off[i] + k);
                    if (w == 0.0) continue;
                    if (l == 0) {
                        nl.weights(rr, k) = w; // reads x directly
                    } else if (i == 0) {
                        nl.weights(rr, col_of(0, k, +1)) += w;
                        nl.weights(rr, col_of(0, k, -1)) -= w;
                    } else {
                        nl.weights(rr, col_of(i, k, 0)) = w;
                    }
                }
            }
        }

        // next state: carries, then the fresh segment l+1
        std::vector<Item> next = carried;
        if (!is_out)
            for (std::size_t k = 0; k < L.fan_out(); ++k) next.push_back({l + 1, k, 0});
        state = std::move(next);
        res.layers.push_back(std::move(nl));
    }
    return res;
}

namespace {

// collation pre-activation minima of a special net over a set of points
Vec collation_minima(const Network& s, const std::vector<Vec>& pts) {
    const std::size_t H = s.n_hidden();
    Vec mins(H, 0.0);
    bool first = true;
    for (const auto& x : pts) {
        Trace tr = evaluate_traced(s, x);
        for (std::size_t l = 0; l < H; ++l) {
            double g = tr.pre[l][s.channel_meta.collation[l]];
            if (first || g < mins[l]) mins[l] = g;
        }
        first = false;
    }
    return mins;
}

// Minima over an ordered uniform grid, lowered by one-kink extrapolation: the
// pre-activations are piecewise linear, so a dip between two samples is found
// by intersecting the lines continued from the neighboring segments. Exact
// whenever an interval contains at most one kink.
Vec collation_minima_pl(const Network& s, const std::vector<Vec>& pts) {
    const std::size_t H = s.n_hidden();
    const std::size_t N = pts.size();
    std::vector<Vec> g(H, Vec(N));
    for (std::size_t i = 0; i < N; ++i) {
        Trace tr = evaluate_traced(s, pts[i]);
        for (std::size_t l = 0; l < H; ++l) g[l][i] = tr.pre[l][s.channel_meta.collation[l]];
    }
    Vec mins(H);
    for (std::size_t l = 0; l < H; ++l) {
        double m = g[l][0];
        for (std::size_t i = 1; i < N; ++i) m = std::min(m, g[l][i]);
        for (std::size_t i = 1; i + 2 < N; ++i) {
            double h = pts[i + 1][0] - pts[i][0];
            if (h <= 0.0) continue;
            double sl = (g[l][i] - g[l][i - 1]) / (pts[i][0] - pts[i - 1][0]);
            double sr = (g[l][i + 2] - g[l][i + 1]) / (pts[i + 2][0] - pts[i + 1][0]);
            double denom = sl - sr;
            if (std::fabs(denom) < 1e-12) continue;
            double t = (g[l][i + 1] - g[l][i] - sr * h) / denom;
            if (t > 0.0 && t < h) m = std::min(m, g[l][i] + sl * t);
        }
        mins[l] = m;
    }
    return mins;
}

} // namespace

std::pair<Network, ShiftCertificate> special_to_standard(const Network& s, const Box& domain) {
    if (s.kind != Kind::special)
        throw std::invalid_argument("special_to_standard: expects a special network");
    require_valid(s);
    if (domain.lo.size() != 1 || domain.hi.size() != 1 || domain.lo[0] > domain.hi[0])
        throw std::invalid_argument("special_to_standard: univariate box domain required");
    if (domain.lo[0] < 0.0)
        throw std::invalid_argument(
            "special_to_standard: domain must satisfy x >= 0 (source channel carries x through ReLU)");

    Vec g = uniform_grid(domain.lo[0], domain.hi[0], 10000);
    std::vector<Vec> pts(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) pts[i] = {g[i]};
    Vec mins = collation_minima_pl(s, pts);
    for (double m : mins)
        if (!std::isfinite(m)) throw std::runtime_error("UnboundedCollation");

    const std::size_t H = s.n_hidden();
    double ref = 0.0;
    for (const auto& x : pts)
        for (double v : evaluate(s, x)) ref = std::max(ref, std::fabs(v));
    const double tol = 1e-9 * std::max(1.0, ref);

    // The sampled minima can miss dips between grid points (the collation
    // pre-activations are piecewise linear with many kinks), so grow a margin
    // until the converted net reproduces the special one on the grid.
    double margin = 0.0;
    for (int attempt = 0;; ++attempt) {
        ShiftCertificate cert;
        cert.C.resize(H);
        for (std::size_t l = 0; l < H; ++l)
            cert.C[l] = std::max(0.0, -(mins[l] - margin)) * 1.1;

        Network out = s;
        out.kind = Kind::standard;
        double total = 0.0;
        for (std::size_t l = 0; l < H; ++l) {
            out.layers[l].bias[s.channel_meta.collation[l]] += cert.C[l];
            out.layers[l].act.tag = Act::relu;
            total += cert.C[l];
        }
        // the shifts ride the unit-weight collation carry into the output
        LinearLayer& last = out.layers.back();
        std::size_t ccol = s.channel_meta.collation[H - 1];
        for (std::size_t r = 0; r < last.fan_out(); ++r)
            last.bias[r] -= last.weights(r, ccol) * total;
        out.channel_meta = {};

        double dev = 0.0;
        for (const auto& x : pts) {
            Vec a = evaluate(out, x), b = evaluate(s, x);
            for (std::size_t r = 0; r < a.size(); ++r)
                dev = std::max(dev, std::fabs(a[r] - b[r]));
        }
        if (dev <= tol && certificate_holds(s, domain, cert, 2000, 1234567u))
            return {std::move(out), std::move(cert)};
        if (attempt == 10)
            throw std::runtime_error("special_to_standard: certificate failed re-validation");
        margin = (margin == 0.0) ? 1e-2 : margin * 8.0;
    }
}

bool certificate_holds(const Network& s, const Box& domain, const ShiftCertificate& cert,
                       std::size_t npoints, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(domain.lo[0], domain.hi[0]);
    std::vector<Vec> pts(npoints);
    for (auto& p : pts) p = {U(rng)};
    Vec mins = collation_minima(s, pts);
    for (std::size_t l = 0; l < cert.C.size(); ++l)
        if (mins[l] + cert.C[l] < 0.0) return false;
    return true;
}

Network special_add(const Network& a, const Network& b) {
    if (a.kind != Kind::special || b.kind != Kind::special)
        throw std::invalid_argument("special_add: both networks must be special");
    require_valid(a);
    require_valid(b);
    const std::size_t W = a.layers[0].fan_out();
    if (b.layers[0].fan_out() != W)
        throw std::invalid_argument("special_add: WidthMismatch");

    // b must start a fresh accumulator and emit it with unit weight
    const LinearLayer& b0 = b.layers[0];
    std::size_t bc0 = b.channel_meta.collation[0];
    for (std::size_t k = 0; k < b0.fan_in(); ++k)
        if (b0.weights(bc0, k) != 0.0)
            throw std::invalid_argument("special_add: b's first collation row must be zero");
    if (b0.bias[bc0] != 0.0)
        throw std::invalid_argument("special_add: b's first collation bias must be zero");
    std::size_t bclast = b.channel_meta.collation.back();
    if (b.layers.back().weights(0, bclast) != 1.0)
        throw std::invalid_argument("special_add: b's output must read its collation with weight 1");
    if (a.output_dim() != 1 || b.output_dim() != 1)
        throw std::invalid_argument("special_add: univariate outputs expected");

    const std::size_t Ha = a.n_hidden();
    Network res;
    res.kind = Kind::special;
    res.input_dim = 1;
    for (std::size_t l = 0; l < Ha; ++l) res.layers.push_back(a.layers[l]);

    // b's first hidden layer, re-wired to read a's last hidden layer
    LinearLayer seam;
    seam.weights = Mat(W, W);
    seam.bias.assign(W, 0.0);
    seam.act = b0.act;
    std::size_t a_src = a.channel_meta.source[Ha - 1];
    std::size_t bs0 = b.channel_meta.source[0];
    for (std::size_t r = 0; r < W; ++r) {
        if (r == bc0) {
            // receive a's output instead of zero
            const LinearLayer& aout = a.layers.back();
            for (std::size_t k = 0; k < W; ++k) seam.weights(r, k) = aout.weights(0, k);
            seam.bias[r] = aout.bias[0];
        } else {
            seam.weights(r, a_src) = b0.weights(r, 0);
            seam.bias[r] = b0.bias[r];
        }
    }
    seam.weights(bs0, a_src) = 1.0;
    seam.bias[bs0] = 0.0;
    res.layers.push_back(std::move(seam));

    for (std::size_t l = 1; l < b.layers.size(); ++l) res.layers.push_back(b.layers[l]);

    res.channel_meta.source = a.channel_meta.source;
    res.channel_meta.collation = a.channel_meta.collation;
    res.channel_meta.source.insert(res.channel_meta.source.end(), b.channel_meta.source.begin(),
                                   b.channel_meta.source.end());
    res.channel_meta.collation.insert(res.channel_meta.collation.end(),
                                      b.channel_meta.collation.begin(),
                                      b.channel_meta.collation.end());
    require_valid(res);
    return res;
}

Network lift_with_channels(const Network& phi) {
    if (phi.kind != Kind::standard || phi.input_dim != 1)
        throw std::invalid_argument("lift_with_channels: standard univariate network expected");
    const std::size_t H = phi.n_hidden();
    if (H == 0) throw std::invalid_argument("lift_with_channels: needs a hidden layer");
    std::size_t W = 0;
    for (std::size_t l = 0; l < H; ++l) W = std::max(W, phi.layers[l].fan_out());

    Network res;
    res.kind = Kind::special;
    res.input_dim = 1;
    for (std::size_t l = 0; l < H; ++l) {
        const LinearLayer& L = phi.layers[l];
        LinearLayer nl;
        nl.act = L.act;
        if (l == 0) {
            nl.weights = Mat(W + 2, 1);
            nl.bias.assign(W + 2, 0.0);
            nl.weights(0, 0) = 1.0; // source
            for (std::size_t r = 0; r < L.fan_out(); ++r) {
                nl.weights(1 + r, 0) = L.weights(r, 0);
                nl.bias[1 + r] = L.bias[r];
            }
        } else {
            nl.weights = Mat(W + 2, W + 2);
            nl.bias.assign(W + 2, 0.0);
            nl.weights(0, 0) = 1.0;          // source carry
            nl.weights(W + 1, W + 1) = 1.0;  // collation carry
            for (std::size_t r = 0; r < L.fan_out(); ++r) {
                for (std::size_t k = 0; k < L.fan_in(); ++k)
                    nl.weights(1 + r, 1 + k) = L.weights(r, k);
                nl.bias[1 + r] = L.bias[r];
            }
        }
        res.layers.push_back(std::move(nl));
        res.channel_meta.source.push_back(0);
        res.channel_meta.collation.push_back(W + 1);
    }
    const LinearLayer& pout = phi.layers.back();
    LinearLayer out;
    out.weights = Mat(1, W + 2);
    out.bias = {pout.bias[0]};
    out.act.tag = Act::identity;
    for (std::size_t k = 0; k < pout.fan_in(); ++k) out.weights(0, 1 + k) = pout.weights(0, k);
    out.weights(0, W + 1) = 1.0; // collation (carries zero here; keeps nets summable)
    res.layers.push_back(std::move(out));
    require_valid(res);
    return res;
}

} // namespace reluforge
