#include "reluforge/network.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace reluforge {

namespace {

bool is_channel_row(const Network& net, std::size_t layer, std::size_t row) {
    if (net.kind != Kind::special || layer >= net.n_hidden()) return false;
    return net.channel_meta.source[layer] == row ||
           net.channel_meta.collation[layer] == row;
}

void apply_act(const Network& net, std::size_t layer, const Vec& z, Vec& out) {
    const LinearLayer& L = net.layers[layer];
    bool is_output = (layer + 1 == net.layers.size());
    out.resize(z.size());
    if (is_output && L.act.tag == Act::softmax) {
        out = softmax_vec(z);
        return;
    }
    for (std::size_t r = 0; r < z.size(); ++r) {
        if (is_output || is_channel_row(net, layer, r))
            out[r] = z[r]; // output layer and special channels stay affine
        else
            out[r] = L.act.value(z[r]);
    }
}

} // namespace

Trace evaluate_traced(const Network& net, const Vec& x) {
    if (x.size() != net.input_dim)
        throw std::invalid_argument("evaluate: input length mismatch (DimensionMismatch)");
    Trace tr;
    tr.pre.resize(net.layers.size());
    tr.post.resize(net.layers.size());
    if (net.kind == Kind::connected) {
        Vec hist = x; // concatenated [x, a^1, a^2, ...]
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const LinearLayer& L = net.layers[l];
            if (L.fan_in() != hist.size())
                throw std::invalid_argument("evaluate: connected fan-in mismatch");
            Vec z(L.fan_out());
            L.weights.apply(hist.data(), L.bias.data(), z.data());
            tr.pre[l] = z;
            apply_act(net, l, z, tr.post[l]);
            if (l + 1 < net.layers.size())
                hist.insert(hist.end(), tr.post[l].begin(), tr.post[l].end());
        }
    } else {
        const Vec* cur = &x;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const LinearLayer& L = net.layers[l];
            if (L.fan_in() != cur->size())
                throw std::invalid_argument("evaluate: fan-in mismatch");
            Vec z(L.fan_out());
            L.weights.apply(cur->data(), L.bias.data(), z.data());
            tr.pre[l] = z;
            apply_act(net, l, z, tr.post[l]);
            cur = &tr.post[l];
        }
    }
    return tr;
}

Vec evaluate(const Network& net, const Vec& x) {
    // leaner than evaluate_traced: two ping-pong buffers, no per-layer storage
    if (x.size() != net.input_dim)
        throw std::invalid_argument("evaluate: input length mismatch (DimensionMismatch)");
    if (net.kind == Kind::connected) {
        Vec hist = x, z;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const LinearLayer& L = net.layers[l];
            z.assign(L.fan_out(), 0.0);
            L.weights.apply(hist.data(), L.bias.data(), z.data());
            Vec post;
            apply_act(net, l, z, post);
            if (l + 1 == net.layers.size()) return post;
            hist.insert(hist.end(), post.begin(), post.end());
        }
        return {};
    }
    Vec cur = x, z, post;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LinearLayer& L = net.layers[l];
        z.assign(L.fan_out(), 0.0);
        L.weights.apply(cur.data(), L.bias.data(), z.data());
        apply_act(net, l, z, post);
        cur = post;
    }
    return cur;
}

std::vector<std::string> validate(const Network& net) {
    std::vector<std::string> v;
    auto fail = [&](const std::string& s) { v.push_back(s); };

    if (net.input_dim == 0) fail("InvalidNetwork: input_dim must be positive");
    if (net.layers.empty()) {
        fail("InvalidNetwork: no layers");
        return v;
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LinearLayer& L = net.layers[l];
        if (L.bias.size() != L.weights.rows)
            fail("DimensionMismatch: layer " + std::to_string(l) + " bias/rows");
        for (double w : L.weights.a)
            if (!std::isfinite(w)) { fail("InvalidNetwork: non-finite weight, layer " + std::to_string(l)); break; }
        for (double b : L.bias)
            if (!std::isfinite(b)) { fail("InvalidNetwork: non-finite bias, layer " + std::to_string(l)); break; }
    }

    // connectivity by kind
    std::size_t hist = net.input_dim;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LinearLayer& L = net.layers[l];
        std::size_t want =
            (net.kind == Kind::connected)
                ? hist
                : (l == 0 ? net.input_dim : net.layers[l - 1].fan_out());
        if (L.fan_in() != want)
            fail("DimensionMismatch: layer " + std::to_string(l) + " fan-in " +
                 std::to_string(L.fan_in()) + " != " + std::to_string(want));
        hist += L.fan_out();
    }

    if (net.kind == Kind::special) {
        std::size_t H = net.n_hidden();
        if (net.channel_meta.source.size() != H || net.channel_meta.collation.size() != H) {
            fail("ChannelViolation: channel_meta must list one source and one collation row per hidden layer");
            return v;
        }
        if (net.input_dim != 1)
            fail("ChannelViolation: special networks are univariate (source carries x)");
        std::size_t W = H ? net.layers[0].fan_out() : 0;
        if (W < 4) fail("ChannelViolation: special width must be >= 4");
        for (std::size_t l = 0; l < H; ++l) {
            const LinearLayer& L = net.layers[l];
            if (L.fan_out() != W) { fail("ChannelViolation: non-uniform hidden width"); continue; }
            std::size_t s = net.channel_meta.source[l], c = net.channel_meta.collation[l];
            if (s >= W || c >= W || s == c) { fail("ChannelViolation: bad channel rows"); continue; }
            // source: unit weight onto x (layer 0) / previous source, zero bias, no other reads
            std::size_t src_col = (l == 0) ? 0 : net.channel_meta.source[l - 1];
            for (std::size_t k = 0; k < L.fan_in(); ++k) {
                double want = (k == src_col) ? 1.0 : 0.0;
                if (L.weights(s, k) != want)
                    { fail("ChannelViolation: source row weights, layer " + std::to_string(l)); break; }
            }
            if (L.bias[s] != 0.0)
                fail("ChannelViolation: source row bias, layer " + std::to_string(l));
            if (l > 0) {
                std::size_t prev_c = net.channel_meta.collation[l - 1];
                if (L.weights(c, prev_c) != 1.0)
                    fail("ChannelViolation: collation must carry with unit weight, layer " + std::to_string(l));
                // collation never feeds compute neurons in later layers
                for (std::size_t r = 0; r < W; ++r) {
                    if (r == c || r == net.channel_meta.source[l]) continue;
                    if (L.weights(r, prev_c) != 0.0) {
                        fail("ChannelViolation: compute row reads collation, layer " + std::to_string(l));
                        break;
                    }
                }
            }
        }
        // output never reads... (it may read collation; compute-read rule above suffices)
    }
    return v;
}

void require_valid(const Network& net) {
    auto v = validate(net);
    if (!v.empty()) {
        std::ostringstream os;
        os << "InvalidNetwork:";
        for (auto& s : v) os << "\n  " << s;
        throw std::invalid_argument(os.str());
    }
}

ComplexityReport complexity(const Network& net) {
    ComplexityReport r;
    r.total_layers = net.layers.size();
    r.hidden_layers = net.layers.size() - 1;
    r.total_neurons = net.input_dim;
    for (const auto& L : net.layers) r.total_neurons += L.fan_out();
    for (const auto& L : net.layers) {
        for (double w : L.weights.a)
            if (w != 0.0) ++r.nonzero_params;
        for (double b : L.bias)
            if (b != 0.0) ++r.nonzero_params;
        r.param_slots += L.fan_out() * (L.fan_in() + 1);
    }
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l)
        r.width = std::max(r.width, net.layers[l].fan_out());

    if (net.kind == Kind::standard && net.input_dim == 1 && net.output_dim() == 1 &&
        net.n_hidden() >= 1) {
        bool uniform = true;
        for (std::size_t l = 0; l + 1 < net.layers.size(); ++l)
            if (net.layers[l].fan_out() != r.width) uniform = false;
        if (uniform) r.closed_form_n = n_of_WL(r.width, r.hidden_layers);
    }
    return r;
}

} // namespace reluforge
