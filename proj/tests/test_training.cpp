#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "reluforge/training.hpp"

using namespace reluforge;

namespace {
Network linear_1x1(double w, double b) {
    Network net;
    net.input_dim = 1;
    LinearLayer out;
    out.weights = Mat(1, 1);
    out.weights(0, 0) = w;
    out.bias = {b};
    out.act.tag = Act::identity;
    net.layers = {out};
    return net;
}

double frob(const Mat& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}
} // namespace

TEST_CASE("cached forward pass") {
    TrainState st{linear_1x1(2.0, -0.5)};
    Vec y = forward_cached(st, {0.75});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(st.fresh);

    Network sm = random_network(2, {4}, 3, 5, Act::relu, Act::softmax);
    TrainState st2{sm};
    Vec p = forward_cached(st2, {0.3, -0.8});
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-14));
    for (double v : p) CHECK(v > 0.0);
}

TEST_CASE("loss values") {
    // quadratic loss is (1/2)||a - y||^2
    CHECK(loss_value(LossKind::quadratic, {1.0}, {0.5}) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(loss_value(LossKind::quadratic, {1.0, 2.0}, {1.0, 2.0}) == 0.0);
    double ce = loss_value(LossKind::cross_entropy, {0.0, 1.0}, {0.25, 0.75});
    CHECK(ce == doctest::Approx(-std::log(0.75)).epsilon(1e-14));
}

TEST_CASE("backprop on a bare affine map") {
    TrainState st{linear_1x1(2.0, 0.0)};
    forward_cached(st, {0.5});
    // L = (1/2)(wx - y)^2 => dL/dw = (wx - y) x, dL/db = wx - y
    Gradients g = backprop(st, {0.5}, {0.2}, LossKind::quadratic);
    CHECK(g.dW[0](0, 0) == doctest::Approx(0.8 * 0.5).epsilon(1e-14));
    CHECK(g.db[0][0] == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("softmax cross-entropy sensitivity is a - y") {
    Network sm = random_network(2, {}, 3, 17, Act::relu, Act::softmax);
    TrainState st{sm};
    Vec x{0.4, -0.2}, y{0.0, 1.0, 0.0};
    Vec a = forward_cached(st, x);
    backprop(st, x, y, LossKind::cross_entropy);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(st.delta.back()[i] == doctest::Approx(a[i] - y[i]).epsilon(1e-14));
    // cross entropy without a softmax head is rejected
    TrainState bad{linear_1x1(1.0, 0.0)};
    forward_cached(bad, {0.5});
    CHECK_THROWS(backprop(bad, {0.5}, {1.0}, LossKind::cross_entropy));
}

TEST_CASE("gradient check") {
    TrainState lin{linear_1x1(1.3, 0.2)};
    CHECK(grad_check(lin, {0.7}, {1.0}, LossKind::quadratic, 1e-5) <= 1e-9);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (unsigned rep = 0; rep < 10; ++rep) {
        Network net = random_network(2, {5, 4}, 2, 100 + rep);
        TrainState st{net};
        CHECK(grad_check(st, {u(rng), u(rng)}, {u(rng), u(rng)}, LossKind::quadratic, 1e-5) <=
              1e-6);
    }
}

TEST_CASE("sgd fits a line") {
    Dataset data;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double x = u(rng);
        data.inputs.push_back({x});
        data.targets.push_back({3.0 * x + 1.0});
    }
    TrainConfig cfg;
    cfg.eta = 0.2;
    cfg.epochs = 200;
    cfg.batch_size = 16;
    cfg.seed = 1;
    TrainResult r = sgd_train(linear_1x1(0.0, 0.0), data, cfg);
    CHECK(std::fabs(r.net.layers[0].weights(0, 0) - 3.0) <= 0.05);
    CHECK(std::fabs(r.net.layers[0].bias[0] - 1.0) <= 0.05);
    CHECK(r.train_loss.back() < r.train_loss.front());
}

TEST_CASE("zero learning rate leaves the parameters bit-identical") {
    Dataset data{{{0.1}, {0.9}}, {{1.0}, {0.0}}};
    Network net = random_network(1, {3}, 1, 44);
    TrainConfig cfg;
    cfg.eta = 0.0;
    cfg.epochs = 3;
    cfg.batch_size = 2;
    TrainResult r = sgd_train(net, data, cfg);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t i = 0; i < net.layers[l].weights.a.size(); ++i)
            CHECK(r.net.layers[l].weights.a[i] == net.layers[l].weights.a[i]);
        for (std::size_t i = 0; i < net.layers[l].bias.size(); ++i)
            CHECK(r.net.layers[l].bias[i] == net.layers[l].bias[i]);
    }
}

TEST_CASE("heavy l2 shrinks weights but not biases") {
    Dataset data{{{0.2}, {0.8}}, {{0.2}, {0.8}}};
    Network net = random_network(1, {4}, 1, 7);
    TrainConfig cfg;
    cfg.eta = 0.01;
    cfg.epochs = 50;
    cfg.batch_size = 2;
    cfg.reg = {Regularizer::Kind::l2, 10.0};
    TrainResult r = sgd_train(net, data, cfg);
    double before = 0.0, after = 0.0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        before += frob(net.layers[l].weights);
        after += frob(r.net.layers[l].weights);
    }
    CHECK(after < 0.1 * before);
}

TEST_CASE("training is reproducible per seed") {
    Dataset data;
    for (int i = 0; i < 40; ++i) {
        double x = double(i) / 39.0;
        data.inputs.push_back({x});
        data.targets.push_back({std::sin(x)});
    }
    Network net = random_network(1, {6}, 1, 2);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 77;
    cfg.early = EarlyStopping{3, 0.25};
    TrainResult a = sgd_train(net, data, cfg);
    TrainResult b = sgd_train(net, data, cfg);
    CHECK(a.epochs_run == b.epochs_run);
    for (std::size_t l = 0; l < a.net.layers.size(); ++l)
        for (std::size_t i = 0; i < a.net.layers[l].weights.a.size(); ++i)
            CHECK(a.net.layers[l].weights.a[i] == b.net.layers[l].weights.a[i]);
    CHECK(!a.val_loss.empty());
}

TEST_CASE("csv loading") {
    std::string path = "train_tmp.csv";
    {
        std::ofstream out(path);
        out << "0.5,0.25,1\n0.1,0.2,0\n";
    }
    Dataset d = load_dataset_csv(path, 2);
    std::remove(path.c_str());
    REQUIRE(d.inputs.size() == 2);
    CHECK(d.inputs[0][0] == 0.5);
    CHECK(d.inputs[0][1] == 0.25);
    CHECK(d.targets[0][0] == 1.0);
    CHECK(d.targets[1][0] == 0.0);
}
