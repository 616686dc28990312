#include "reluforge/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace reluforge {

Dataset load_dataset_csv(const std::string& path, std::size_t input_dim) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_dataset_csv: cannot open " + path);
    Dataset ds;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        Vec row;
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() <= input_dim)
            throw std::runtime_error("load_dataset_csv: row shorter than input_dim + 1");
        ds.inputs.emplace_back(row.begin(), row.begin() + static_cast<long>(input_dim));
        ds.targets.emplace_back(row.begin() + static_cast<long>(input_dim), row.end());
    }
    return ds;
}

void Gradients::add(const Gradients& o, double scale) {
    for (std::size_t l = 0; l < dW.size(); ++l) {
        for (std::size_t i = 0; i < dW[l].a.size(); ++i) dW[l].a[i] += scale * o.dW[l].a[i];
        for (std::size_t i = 0; i < db[l].size(); ++i) db[l][i] += scale * o.db[l][i];
    }
}

Vec forward_cached(TrainState& st, const Vec& x) {
    if (x.size() != st.net.input_dim)
        throw std::invalid_argument("forward_cached: DimensionMismatch");
    st.cache = evaluate_traced(st.net, x);
    st.fresh = true;
    return st.cache.post.back();
}

double loss_value(LossKind kind, const Vec& y, const Vec& aL) {
    if (y.size() != aL.size()) throw std::invalid_argument("loss_value: DimensionMismatch");
    if (kind == LossKind::quadratic) {
        double s = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) s += (y[j] - aL[j]) * (y[j] - aL[j]);
        return 0.5 * s;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] == 0.0) continue;
        if (!(aL[j] > 0.0)) throw std::runtime_error("loss_value: NonPositiveProbability");
        s -= y[j] * std::log(aL[j]);
    }
    return s;
}

Gradients backprop(TrainState& st, const Vec& x, const Vec& y, LossKind kind) {
    if (!st.fresh) throw std::runtime_error("backprop: StaleCache");
    const Network& net = st.net;
    const std::size_t nl = net.layers.size();
    st.delta.assign(nl, {});

    const Vec& aL = st.cache.post.back();
    const Vec& zL = st.cache.pre.back();
    const Activation& oact = net.layers.back().act;
    Vec dL(aL.size());
    if (kind == LossKind::cross_entropy) {
        if (oact.tag != Act::softmax)
            throw std::invalid_argument("backprop: cross-entropy expects a softmax head");
        for (std::size_t j = 0; j < aL.size(); ++j) dL[j] = aL[j] - y[j]; // combined form
    } else {
        for (std::size_t j = 0; j < aL.size(); ++j)
            dL[j] = (aL[j] - y[j]) *
                    (oact.tag == Act::identity ? 1.0 : oact.deriv(zL[j]));
    }
    st.delta[nl - 1] = std::move(dL);

    for (std::size_t l = nl - 1; l-- > 0;) {
        const LinearLayer& up = net.layers[l + 1];
        const Vec& z = st.cache.pre[l];
        Vec d(net.layers[l].fan_out(), 0.0);
        for (std::size_t j = 0; j < d.size(); ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < up.fan_out(); ++r) s += up.weights(r, j) * st.delta[l + 1][r];
            d[j] = s * net.layers[l].act.deriv(z[j]);
        }
        st.delta[l] = std::move(d);
    }

    Gradients g;
    g.dW.reserve(nl);
    g.db.reserve(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        const Vec& prev = (l == 0) ? x : st.cache.post[l - 1];
        Mat dw(net.layers[l].fan_out(), prev.size());
        for (std::size_t r = 0; r < dw.rows; ++r)
            for (std::size_t c = 0; c < dw.cols; ++c) dw(r, c) = st.delta[l][r] * prev[c];
        g.dW.push_back(std::move(dw));
        g.db.push_back(st.delta[l]);
    }
    return g;
}

namespace {

bool crosses_kink(const Network& net, const Trace& t1, const Trace& t2) {
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
        if (net.layers[l].act.tag != Act::relu && net.layers[l].act.tag != Act::relu6 &&
            net.layers[l].act.tag != Act::leaky_relu &&
            net.layers[l].act.tag != Act::parametric_relu)
            continue;
        for (std::size_t j = 0; j < t1.pre[l].size(); ++j) {
            double a = t1.pre[l][j], b = t2.pre[l][j];
            if (a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)) return true;
        }
    }
    return false;
}

} // namespace

double grad_check(TrainState& st, const Vec& x, const Vec& y, LossKind kind, double h) {
    if (!(h > 0.0 && h <= 1e-3)) throw std::invalid_argument("grad_check: h in (0, 1e-3]");
    forward_cached(st, x);
    Gradients g = backprop(st, x, y, kind);

    double worst = 0.0;
    for (std::size_t l = 0; l < st.net.layers.size(); ++l) {
        LinearLayer& L = st.net.layers[l];
        const std::size_t nw = L.weights.a.size();
        for (std::size_t p = 0; p < nw + L.bias.size(); ++p) {
            double* th = (p < nw) ? &L.weights.a[p] : &L.bias[p - nw];
            double bp = (p < nw) ? g.dW[l].a[p] : g.db[l][p - nw];
            double orig = *th;
            *th = orig + h;
            Trace tp = evaluate_traced(st.net, x);
            double cp = loss_value(kind, y, tp.post.back());
            *th = orig - h;
            Trace tm = evaluate_traced(st.net, x);
            double cm = loss_value(kind, y, tm.post.back());
            *th = orig;
            if (crosses_kink(st.net, tp, tm)) continue; // nondifferentiable neighborhood
            double fd = (cp - cm) / (2.0 * h);
            double rel = std::fabs(bp - fd) / std::max({std::fabs(bp), std::fabs(fd), 1e-4});
            worst = std::max(worst, rel);
        }
    }
    st.fresh = false;
    return worst;
}

Network random_network(std::size_t input_dim, const std::vector<std::size_t>& hidden_widths,
                       std::size_t output_dim, unsigned seed, Act hidden, Act output) {
    std::mt19937 rng(seed);
    Network net;
    net.kind = Kind::standard;
    net.input_dim = input_dim;
    std::size_t prev = input_dim;
    auto make_layer = [&](std::size_t fan_out, Act tag) {
        LinearLayer L;
        L.weights = Mat(fan_out, prev);
        L.bias.assign(fan_out, 0.0);
        L.act.tag = tag;
        double s = 1.0 / std::sqrt(static_cast<double>(prev));
        std::uniform_real_distribution<double> u(-s, s);
        for (auto& w : L.weights.a) w = u(rng);
        for (auto& b : L.bias) b = u(rng);
        prev = fan_out;
        return L;
    };
    for (auto w : hidden_widths) net.layers.push_back(make_layer(w, hidden));
    net.layers.push_back(make_layer(output_dim, output));
    return net;
}

TrainResult sgd_train(const Network& net, const Dataset& data, const TrainConfig& cfg) {
    if (data.inputs.empty()) throw std::invalid_argument("sgd_train: EmptyDataset");
    if (data.inputs.size() != data.targets.size())
        throw std::invalid_argument("sgd_train: input/target count mismatch");
    if (cfg.batch_size < 1 || cfg.batch_size > data.inputs.size())
        throw std::invalid_argument("sgd_train: bad batch size");

    std::mt19937 rng(cfg.seed);
    std::vector<std::size_t> idx(data.inputs.size());
    std::iota(idx.begin(), idx.end(), 0);

    std::size_t n_val = 0;
    if (cfg.early) {
        std::shuffle(idx.begin(), idx.end(), rng);
        n_val = static_cast<std::size_t>(cfg.early->validation_split *
                                         static_cast<double>(idx.size()));
        n_val = std::min(n_val, idx.size() - 1);
    }
    std::vector<std::size_t> val(idx.end() - static_cast<long>(n_val), idx.end());
    std::vector<std::size_t> train(idx.begin(), idx.end() - static_cast<long>(n_val));

    TrainState st;
    st.net = net;
    TrainResult res;

    auto mean_loss = [&](const std::vector<std::size_t>& which) {
        double s = 0.0;
        for (auto i : which)
            s += loss_value(cfg.loss, data.targets[i], evaluate(st.net, data.inputs[i]));
        return s / static_cast<double>(which.size());
    };

    double best_val = 0.0;
    std::size_t since_best = 0;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        std::shuffle(train.begin(), train.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < train.size(); start += cfg.batch_size) {
            std::size_t stop = std::min(start + cfg.batch_size, train.size());
            Gradients acc;
            double inv = 1.0 / static_cast<double>(stop - start);
            for (std::size_t t = start; t < stop; ++t) {
                const Vec& x = data.inputs[train[t]];
                const Vec& y = data.targets[train[t]];
                forward_cached(st, x);
                epoch_loss += loss_value(cfg.loss, y, st.cache.post.back());
                Gradients g = backprop(st, x, y, cfg.loss);
                if (acc.dW.empty())
                    acc = std::move(g);
                else
                    acc.add(g, 1.0);
            }
            for (std::size_t l = 0; l < st.net.layers.size(); ++l) {
                LinearLayer& L = st.net.layers[l];
                for (std::size_t i = 0; i < L.weights.a.size(); ++i) {
                    double w = L.weights.a[i];
                    double step = cfg.eta * inv * acc.dW[l].a[i];
                    if (cfg.reg.kind == Regularizer::Kind::l2)
                        step += cfg.eta * cfg.reg.lambda * w;
                    else if (cfg.reg.kind == Regularizer::Kind::l1)
                        step += cfg.eta * cfg.reg.lambda * (w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0));
                    L.weights.a[i] = w - step;
                }
                for (std::size_t i = 0; i < L.bias.size(); ++i)
                    L.bias[i] -= cfg.eta * inv * acc.db[l][i]; // biases unregularized
            }
        }
        res.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));
        res.epochs_run = e + 1;
        if (cfg.early) {
            double vl = mean_loss(val);
            res.val_loss.push_back(vl);
            if (e == 0 || vl < best_val) {
                best_val = vl;
                since_best = 0;
            } else if (++since_best >= cfg.early->patience) {
                break;
            }
        }
    }
    res.net = std::move(st.net);
    return res;
}

} // namespace reluforge
