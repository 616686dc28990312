#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reluforge/constructions.hpp"
#include "reluforge/json_io.hpp"
#include "reluforge/network.hpp"
#include "reluforge/training.hpp"

using namespace reluforge;

TEST_CASE("hat network values") {
    Network h = hat_network();
    CHECK(evaluate(h, {0.25})[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(evaluate(h, {0.5})[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(h, {0.75})[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(evaluate(h, {-0.5})[0] == 0.0);
    CHECK(evaluate(h, {1.5})[0] == 0.0);
}

TEST_CASE("hat complexity counts") {
    ComplexityReport r = complexity(hat_network());
    CHECK(r.hidden_layers == 1);
    CHECK(r.total_layers == 2);
    CHECK(r.total_neurons == 5);
    CHECK(r.nonzero_params == 8);
    CHECK(r.param_slots == 10);
    CHECK(r.width == 3);
}

TEST_CASE("closed-form slot count") {
    CHECK(n_of_WL(8, 2) == 97);  // W^2 + 4W + 1
    CHECK(n_of_WL(14, 2) == 253);
}

TEST_CASE("validate flags shape errors") {
    Network bad = hat_network();
    bad.layers[0].bias.pop_back();
    CHECK(!validate(bad).empty());
    CHECK_THROWS_AS(require_valid(bad), std::invalid_argument);
}

TEST_CASE("activation basics") {
    Activation relu{Act::relu};
    CHECK(relu.value(-1.0) == 0.0);
    CHECK(relu.value(2.0) == 2.0);
    CHECK(relu.deriv(0.0) == 1.0); // convention used throughout
    Vec p = softmax_vec({1.0, 2.0, 3.0});
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[2] > p[1]);
}

TEST_CASE("json round trip is lossless") {
    Network net = random_network(2, {5, 3}, 2, 123);
    Network back = network_from_json(network_to_json(net));
    CHECK(back.kind == net.kind);
    CHECK(back.input_dim == net.input_dim);
    for (double x : {-0.7, 0.1, 0.9}) {
        Vec a = evaluate(net, {x, -x});
        Vec b = evaluate(back, {x, -x});
        CHECK(a[0] == b[0]); // bitwise
        CHECK(a[1] == b[1]);
    }
}

TEST_CASE("evaluate_traced matches evaluate and exposes caches") {
    Network h = hat_network();
    Trace t = evaluate_traced(h, {0.25});
    CHECK(t.post.back()[0] == evaluate(h, {0.25})[0]);
    CHECK(t.pre[0][0] == doctest::Approx(0.25));
    CHECK(t.pre[0][1] == doctest::Approx(-0.25));
    CHECK(t.post[0][1] == 0.0); // relu clips
}
