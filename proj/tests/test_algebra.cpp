#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reluforge/algebra.hpp"
#include "reluforge/constructions.hpp"
#include "reluforge/grid.hpp"
#include "reluforge/training.hpp"

using namespace reluforge;

namespace {
double hat2(double x) {
    auto h = [](double t) { return t <= 0.5 ? 2.0 * t : 2.0 * (1.0 - t); };
    return h(h(x));
}
} // namespace

TEST_CASE("identity network is exact") {
    Network id = identity_network(3);
    Vec x{-0.3, 0.7, 2.5};
    Vec y = evaluate(id, x);
    for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-15));
    CHECK(complexity(id).nonzero_params == 12); // 4d
}

TEST_CASE("compose realizes the composition") {
    Network h = hat_network();
    Network c = compose(h, h);
    CHECK(c.kind == Kind::connected);
    for (double x : uniform_grid(0.0, 1.0, 500))
        CHECK(std::fabs(evaluate(c, {x})[0] - hat2(x)) <= 1e-12);
    ComplexityReport r1 = complexity(h), rc = complexity(c);
    CHECK(rc.total_layers == 2 * r1.total_layers);
    CHECK(rc.total_neurons <= 2 * (2 * r1.total_neurons));
    CHECK(rc.nonzero_params <= 2 * (2 * r1.nonzero_params));
}

TEST_CASE("compose_merge keeps the standard form") {
    Network h = hat_network();
    Network c = compose_merge(h, h);
    CHECK(c.kind == Kind::standard);
    for (double x : uniform_grid(0.0, 1.0, 500))
        CHECK(std::fabs(evaluate(c, {x})[0] - hat2(x)) <= 1e-13);
    CHECK(complexity(c).hidden_layers == 2);
}

TEST_CASE("concat stacks outputs and adds complexity exactly") {
    Network a = hat_network();
    Network b = squarer_network({2, 0.0});
    Network c = concat(a, b);
    for (double x : uniform_grid(0.0, 1.0, 100)) {
        Vec y = evaluate(c, {x});
        CHECK(std::fabs(y[0] - evaluate(a, {x})[0]) <= 1e-13);
        CHECK(std::fabs(y[1] - evaluate(b, {x})[0]) <= 1e-13);
    }
    ComplexityReport ra = complexity(a), rb = complexity(b), rc = complexity(c);
    CHECK(rc.total_neurons == ra.total_neurons + rb.total_neurons - 1);
    CHECK(rc.nonzero_params == ra.nonzero_params + rb.nonzero_params);
    CHECK(rc.total_layers == std::max(ra.total_layers, rb.total_layers));
}

TEST_CASE("connected_to_standard preserves outputs") {
    Network c = compose(hat_network(), squarer_network({2, 0.0}));
    Network s = connected_to_standard(c);
    CHECK(s.kind == Kind::standard);
    for (double x : uniform_grid(0.0, 1.0, 500))
        CHECK(std::fabs(evaluate(s, {x})[0] - evaluate(c, {x})[0]) <= 1e-12);
}

TEST_CASE("lift and special_to_standard round trip") {
    Network lifted = lift_with_channels(hat_network());
    CHECK(lifted.kind == Kind::special);
    for (double x : uniform_grid(0.0, 1.0, 200))
        CHECK(std::fabs(evaluate(lifted, {x})[0] - evaluate(hat_network(), {x})[0]) <= 1e-14);
    auto [snet, cert] = special_to_standard(lifted, Box{{0.0}, {1.0}});
    CHECK(snet.kind == Kind::standard);
    CHECK(certificate_holds(lifted, Box{{0.0}, {1.0}}, cert, 500, 7u));
    for (double x : uniform_grid(0.0, 1.0, 500))
        CHECK(std::fabs(evaluate(snet, {x})[0] - evaluate(lifted, {x})[0]) <= 1e-12);
}

TEST_CASE("special_to_standard rejects negative domains") {
    Network lifted = lift_with_channels(hat_network());
    CHECK_THROWS(special_to_standard(lifted, Box{{-1.0}, {1.0}}));
}

TEST_CASE("special_add sums two lifted networks") {
    Network a = lift_with_channels(hat_network());
    Network b = lift_with_channels(sawtooth_network(2)); // same lifted width as the hat
    Network s = special_add(a, b);
    CHECK(s.kind == Kind::special);
    CHECK(s.n_hidden() == a.n_hidden() + b.n_hidden());
    for (double x : uniform_grid(0.0, 1.0, 300)) {
        double want = evaluate(hat_network(), {x})[0] + evaluate(sawtooth_network(2), {x})[0];
        CHECK(std::fabs(evaluate(s, {x})[0] - want) <= 1e-13);
    }
}

TEST_CASE("as_connected view evaluates identically") {
    Network n = random_network(2, {4, 3}, 2, 55);
    Network c = as_connected(n);
    for (double x : {-0.4, 0.2, 0.9}) {
        Vec a = evaluate(n, {x, 1.0 - x});
        Vec b = evaluate(c, {x, 1.0 - x});
        CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-15));
        CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-15));
    }
}
