#include "reluforge/splines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "reluforge/algebra.hpp"

namespace reluforge {

FreeKnotSpline make_spline(Vec breakpoints, Vec values) {
    if (values.size() != breakpoints.size() + 2)
        throw std::invalid_argument("make_spline: value list length must be knots + 2");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > 0.0 && breakpoints[i] < 1.0))
            throw std::invalid_argument("make_spline: breakpoints must lie in (0,1)");
        if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("make_spline: breakpoints must strictly increase");
    }
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("make_spline: non-finite value");
    return {std::move(breakpoints), std::move(values)};
}

double eval_spline(const FreeKnotSpline& S, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("eval_spline: OutOfDomain");
    const auto& bp = S.breakpoints;
    // nodes are 0, bp..., 1
    std::size_t hi = static_cast<std::size_t>(
        std::upper_bound(bp.begin(), bp.end(), x) - bp.begin()); // first node index > x is hi+? :
    // segment [n_hi, n_{hi+1}] with n_0 = 0, n_{k+1} = bp[k], n_{last} = 1
    double x0 = (hi == 0) ? 0.0 : bp[hi - 1];
    double x1 = (hi == bp.size()) ? 1.0 : bp[hi];
    double v0 = S.values[hi];
    double v1 = S.values[hi + 1];
    if (x1 == x0) return v0;
    double t = (x - x0) / (x1 - x0);
    return v0 + t * (v1 - v0);
}

void save_spline(const FreeKnotSpline& S, const std::string& path) {
    nlohmann::json j;
    j["breakpoints"] = S.breakpoints;
    j["values"] = S.values;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_spline: cannot open " + path);
    f << j.dump(2) << "\n";
}

FreeKnotSpline load_spline(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_spline: cannot open " + path);
    nlohmann::json j;
    f >> j;
    return make_spline(j.at("breakpoints").get<Vec>(), j.at("values").get<Vec>());
}

Network spline_to_shallow(const FreeKnotSpline& S, std::size_t W) {
    const std::size_t n = S.breakpoints.size();
    if (n > W - 1) throw std::invalid_argument("spline_to_shallow: TooManyKnots");
    Vec nodes{0.0};
    nodes.insert(nodes.end(), S.breakpoints.begin(), S.breakpoints.end());
    nodes.push_back(1.0);
    Vec slope(n + 1);
    for (std::size_t s = 0; s <= n; ++s)
        slope[s] = (S.values[s + 1] - S.values[s]) / (nodes[s + 1] - nodes[s]);

    Network net;
    net.kind = Kind::standard;
    net.input_dim = 1;
    LinearLayer h;
    h.weights = Mat(W, 1);
    h.bias.assign(W, 0.0);
    h.act.tag = Act::relu;
    h.weights(0, 0) = 1.0; // sigma(x) = x carries the leading a*x term
    for (std::size_t k = 0; k < n; ++k) {
        h.weights(k + 1, 0) = 1.0;
        h.bias[k + 1] = -S.breakpoints[k];
    }
    LinearLayer out;
    out.weights = Mat(1, W);
    out.bias = {S.values[0]};
    out.act.tag = Act::identity;
    out.weights(0, 0) = slope[0];
    for (std::size_t k = 0; k < n; ++k) out.weights(0, k + 1) = slope[k + 1] - slope[k];
    net.layers = {std::move(h), std::move(out)};
    return net;
}

FreeKnotSpline network_to_spline(const Network& phi) {
    if (phi.kind != Kind::standard || phi.input_dim != 1 || phi.layers.size() != 2 ||
        phi.output_dim() != 1)
        throw std::invalid_argument("network_to_spline: one-hidden-layer 1-in/1-out net required");
    const LinearLayer& h = phi.layers[0];
    Vec bp;
    for (std::size_t r = 0; r < h.fan_out(); ++r) {
        double w = h.weights(r, 0);
        if (w == 0.0) continue;
        double t = -h.bias[r] / w;
        if (t > 0.0 && t < 1.0) bp.push_back(t);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(),
                         [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
             bp.end());
    Vec vals;
    vals.push_back(evaluate(phi, {0.0})[0]);
    for (double t : bp) vals.push_back(evaluate(phi, {t})[0]);
    vals.push_back(evaluate(phi, {1.0})[0]);
    return make_spline(std::move(bp), std::move(vals));
}

double eval_basis_hat(const BasisDecomposition& D, std::size_t k, double x) {
    std::size_t j = D.j_of(k);
    double l = D.xs[k - 1];      // jq - i
    double peak = D.xs[j * D.q]; // xi_j
    double r = D.xs[j * D.q + 1];
    if (x <= l || x >= r) return 0.0;
    return (x <= peak) ? (x - l) / (peak - l) : (r - x) / (r - peak);
}

BasisDecomposition decompose_basis_nodes(const Vec& xs, const Vec& vals, std::size_t W) {
    if (W < 8) throw std::invalid_argument("decompose_basis: W >= 8 required");
    BasisDecomposition D;
    D.W = W;
    D.q = (W - 2) / 6;
    D.M = D.q * (W - 2);
    if (xs.size() != D.M + 2 || vals.size() != D.M + 2)
        throw std::invalid_argument("decompose_basis: WrongKnotCount");
    if (std::fabs(vals.front()) > 1e-12 || std::fabs(vals.back()) > 1e-12)
        throw std::invalid_argument("decompose_basis: NotVanishing");
    D.xs = xs;
    D.coeffs.assign(D.M, 0.0);

    // the k-th hat first becomes nonzero at xs[k-1], so evaluating left to
    // right at xs[t] gives a triangular solve
    for (std::size_t t = 1; t <= D.M; ++t) {
        double s = vals[t];
        for (std::size_t k = 1; k < t; ++k)
            if (D.coeffs[k - 1] != 0.0) s -= D.coeffs[k - 1] * eval_basis_hat(D, k, xs[t]);
        D.coeffs[t - 1] = s / eval_basis_hat(D, t, xs[t]);
    }

    // sign-pure, 3-separated groups keyed by (sign, i, j mod 3)
    std::map<std::tuple<int, std::size_t, std::size_t>, std::vector<std::size_t>> part;
    for (std::size_t k = 1; k <= D.M; ++k) {
        double c = D.coeffs[k - 1];
        if (c == 0.0) continue;
        part[{c > 0 ? 1 : -1, D.i_of(k), D.j_of(k) % 3}].push_back(k);
    }
    for (auto& [key, ks] : part)
        D.groups.push_back({std::get<0>(key), std::get<1>(key), std::move(ks)});
    return D;
}

BasisDecomposition decompose_basis(const FreeKnotSpline& S0, std::size_t W) {
    Vec xs{0.0};
    xs.insert(xs.end(), S0.breakpoints.begin(), S0.breakpoints.end());
    xs.push_back(1.0);
    return decompose_basis_nodes(xs, S0.values, W);
}

double GroupPL::eval(double x) const {
    double v = v0;
    double prev = 0.0;
    for (std::size_t t = 0; t < xi.size(); ++t) {
        double seg_end = xi[t];
        if (x <= seg_end) return v + slopes[t] * (x - prev);
        v += slopes[t] * (seg_end - prev);
        prev = seg_end;
    }
    return v + slopes.back() * (x - prev);
}

GroupPL build_gp(const BasisDecomposition& D, std::size_t p) {
    if (p >= D.groups.size() || D.groups[p].ks.empty())
        throw std::invalid_argument("build_gp: EmptyGroup");
    const auto& g = D.groups[p];
    const std::size_t nxi = D.W - 2;
    GroupPL out;
    out.sign = g.sign;
    out.xi.resize(nxi);
    for (std::size_t j = 1; j <= nxi; ++j) out.xi[j - 1] = D.xs[j * D.q];

    double maxu = 0.0;
    for (auto k : g.ks) maxu = std::max(maxu, std::fabs(D.coeffs[k - 1]));
    // node values at 0, xi_1..xi_{W-2}; safeguard keeps sigma clipped elsewhere
    Vec val(nxi + 1, -(maxu + 1.0));
    double last_slope = 0.0;
    for (auto k : g.ks) {
        std::size_t j = D.j_of(k);
        double u = std::fabs(D.coeffs[k - 1]);
        double l = D.xs[k - 1];
        double r = D.xs[j * D.q + 1];
        double peak = D.xs[j * D.q];
        val[j] = u;
        val[j - 1] = u * (((j == 1) ? 0.0 : out.xi[j - 2]) - l) / (peak - l);
        if (j == nxi)
            last_slope = -u / (r - peak); // keep descending through the zero at r
        else
            val[j + 1] = u * (r - out.xi[j]) / (r - peak);
    }
    out.v0 = val[0];
    out.slopes.resize(nxi + 1);
    double prev = 0.0;
    for (std::size_t t = 0; t < nxi; ++t) {
        out.slopes[t] = (val[t + 1] - val[t]) / (out.xi[t] - prev);
        prev = out.xi[t];
    }
    out.slopes[nxi] = last_slope;
    return out;
}

Network embed_S0_nodes(const Vec& xs, const Vec& vals, std::size_t W) {
    BasisDecomposition D = decompose_basis_nodes(xs, vals, W);
    const std::size_t nxi = W - 2;

    Network net;
    net.kind = Kind::special;
    net.input_dim = 1;

    LinearLayer l1; // source, sigma(x - xi_j), zero collation
    l1.weights = Mat(W, 1);
    l1.bias.assign(W, 0.0);
    l1.act.tag = Act::relu;
    l1.weights(0, 0) = 1.0;
    for (std::size_t j = 1; j <= nxi; ++j) {
        l1.weights(j, 0) = 1.0;
        l1.bias[j] = -D.xs[j * D.q];
    }
    net.layers.push_back(std::move(l1));

    LinearLayer l2; // per-group sigma(g_p), collation carries
    l2.weights = Mat(W, W);
    l2.bias.assign(W, 0.0);
    l2.act.tag = Act::relu;
    l2.weights(0, 0) = 1.0;
    Vec out_sign(W, 0.0);
    for (std::size_t p = 0; p < D.groups.size(); ++p) {
        GroupPL gp = build_gp(D, p);
        std::size_t r = p + 1;
        l2.weights(r, 0) = gp.slopes[0];
        l2.bias[r] = gp.v0;
        for (std::size_t t = 1; t <= nxi; ++t)
            l2.weights(r, t) = gp.slopes[t] - gp.slopes[t - 1];
        out_sign[r] = static_cast<double>(gp.sign);
    }
    l2.weights(W - 1, W - 1) = 1.0;
    net.layers.push_back(std::move(l2));

    LinearLayer out;
    out.weights = Mat(1, W);
    out.bias = {0.0};
    out.act.tag = Act::identity;
    for (std::size_t c = 0; c < W; ++c) out.weights(0, c) = out_sign[c];
    out.weights(0, W - 1) = 1.0;
    net.layers.push_back(std::move(out));

    net.channel_meta = ChannelMeta{{0, 0}, {W - 1, W - 1}};
    require_valid(net);
    return net;
}

Network embed_S0(const FreeKnotSpline& S0, std::size_t W) {
    Vec xs{0.0};
    xs.insert(xs.end(), S0.breakpoints.begin(), S0.breakpoints.end());
    xs.push_back(1.0);
    return embed_S0_nodes(xs, S0.values, W);
}

namespace {

// interpolant of the nodal data using only knots[from..] plus the endpoints
double tail_interp(const Vec& knots, const Vec& tvals, std::size_t from, double x) {
    // nodes: 0 (value tvals[0] which is 0), knots[from..], 1
    double x0 = 0.0, v0 = 0.0;
    for (std::size_t t = from; t < knots.size(); ++t) {
        if (x <= knots[t]) {
            double x1 = knots[t], v1 = tvals[t + 1];
            return v0 + (x - x0) * (v1 - v0) / (x1 - x0);
        }
        x0 = knots[t];
        v0 = tvals[t + 1];
    }
    return v0 + (x - x0) * (0.0 - v0) / (1.0 - x0);
}

} // namespace

Network embed_spline(const FreeKnotSpline& S, std::size_t W) {
    if (W < 8) throw std::invalid_argument("embed_spline: W >= 8 required");
    const std::size_t q = (W - 2) / 6;
    const std::size_t M = q * (W - 2);
    const std::size_t n = S.breakpoints.size();
    if (n == 0 || n % M != 0)
        throw std::invalid_argument("embed_spline: knot count must be a positive multiple of q(W-2)");
    const std::size_t L = n / M;

    // subtract the endpoint-interpolating line, leaving T with T(0)=T(1)=0
    const double b_line = S.values.front();
    const double a_line = S.values.back() - S.values.front();
    Vec tvals(S.values.size());
    tvals[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        tvals[i + 1] = S.values[i + 1] - (a_line * S.breakpoints[i] + b_line);
    tvals[n + 1] = 0.0;

    // T = sum of block pieces T_j, each with kinks only at its own M knots;
    // T_j = (interp over blocks >= j) - (interp over blocks >= j+1)
    Network acc;
    for (std::size_t j = 0; j < L; ++j) {
        Vec xs(M + 2), vals(M + 2, 0.0);
        xs[0] = 0.0;
        for (std::size_t t = 0; t < M; ++t) {
            xs[t + 1] = S.breakpoints[j * M + t];
            vals[t + 1] = tvals[j * M + t + 1] -
                          tail_interp(S.breakpoints, tvals, (j + 1) * M, xs[t + 1]);
        }
        xs[M + 1] = (j + 1 < L) ? S.breakpoints[(j + 1) * M] : 1.0;
        Network piece = embed_S0_nodes(xs, vals, W);
        acc = (j == 0) ? std::move(piece) : special_add(acc, piece);
    }

    // re-add the line through the source channel
    LinearLayer& out = acc.layers.back();
    out.weights(0, 0) += a_line;
    out.bias[0] += b_line;
    require_valid(acc);
    return acc;
}

FreeKnotSpline pad_spline(const FreeKnotSpline& S, std::size_t target_knots) {
    FreeKnotSpline P = S;
    while (P.breakpoints.size() < target_knots) {
        Vec nodes{0.0};
        nodes.insert(nodes.end(), P.breakpoints.begin(), P.breakpoints.end());
        nodes.push_back(1.0);
        double best = -1.0;
        std::size_t at = 0;
        for (std::size_t s = 0; s + 1 < nodes.size(); ++s)
            if (nodes[s + 1] - nodes[s] > best) {
                best = nodes[s + 1] - nodes[s];
                at = s;
            }
        double mid = 0.5 * (nodes[at] + nodes[at + 1]);
        double v = eval_spline(P, mid);
        P.breakpoints.insert(P.breakpoints.begin() + static_cast<long>(at), mid);
        P.values.insert(P.values.begin() + static_cast<long>(at) + 1, v);
    }
    return P;
}

std::pair<Network, ComplexityReport> theorem1(const FreeKnotSpline& S, std::size_t W) {
    if (W < 8) throw std::invalid_argument("theorem1: W >= 8 required");
    const std::size_t q = (W - 2) / 6;
    const std::size_t M = q * (W - 2);
    const std::size_t n = S.breakpoints.size();
    const std::size_t blocks = std::max<std::size_t>(1, (n + M - 1) / M);
    const std::size_t L = 2 * blocks; // hidden depth per the theorem

    FreeKnotSpline P = pad_spline(S, blocks * M);
    Network special = embed_spline(P, W);
    auto [std_net, cert] = special_to_standard(special, Box{{0.0}, {1.0}});
    (void)cert;
    ComplexityReport rep = complexity(std_net);
    if (rep.hidden_layers != L)
        throw std::runtime_error("theorem1: depth does not match the predicted L");
    if (n < M) {
        if (rep.closed_form_n != W * W + 4 * W + 1)
            throw std::runtime_error("theorem1: small-case parameter formula violated");
    } else {
        if (rep.closed_form_n > 61 * n)
            throw std::runtime_error("theorem1: parameter bound 61n violated");
    }
    return {std::move(std_net), rep};
}

} // namespace reluforge
