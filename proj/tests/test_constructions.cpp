#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reluforge/algebra.hpp"
#include "reluforge/constructions.hpp"
#include "reluforge/grid.hpp"

using namespace reluforge;

TEST_CASE("both hats agree on the unit interval") {
    Network a = hat_network(), b = hat_network_m21();
    for (double x : uniform_grid(0.0, 1.0, 400))
        CHECK(std::fabs(evaluate(a, {x})[0] - evaluate(b, {x})[0]) <= 1e-15);
}

TEST_CASE("sawtooth counts") {
    for (std::size_t s : {1u, 2u, 3u, 5u}) {
        ComplexityReport r = complexity(sawtooth_network(s));
        CHECK(r.total_neurons == 3 * s + 2);
        CHECK(r.param_slots == 12 * s - 2);
        CHECK(r.nonzero_params == 11 * s - 3);
        CHECK(r.hidden_layers == s);
    }
}

TEST_CASE("sawtooth values") {
    Network h2 = sawtooth_network(2);
    CHECK(evaluate(h2, {0.25})[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(h2, {0.5})[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(evaluate(h2, {0.625})[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("squarer is exact at dyadics and tight at midpoints") {
    for (std::size_t m : {1u, 2u, 4u, 6u}) {
        Network g = squarer_network({m, 0.0});
        double n = std::pow(2.0, double(m));
        for (std::size_t j = 0; j <= std::size_t(n); ++j) {
            double x = double(j) / n;
            CHECK(std::fabs(evaluate(g, {x})[0] - x * x) <= 1e-15);
        }
        double mid = 0.5 / n; // first midpoint: interpolant - x^2 = 2^{-2(m+1)}
        double err = std::fabs(evaluate(g, {mid})[0] - mid * mid);
        CHECK(err == doctest::Approx(std::pow(2.0, -2.0 * double(m + 1))).epsilon(1e-12));
        ComplexityReport r = complexity(g);
        CHECK(r.param_slots == 20 * m - 7);
        CHECK(r.total_neurons == 4 * m + 2);
        CHECK(r.total_layers == m + 1);
    }
}

TEST_CASE("squarer depth from accuracy target") {
    CHECK(squarer_from_eps(1e-3).m == 5); // 2^{-10} <= 1e-3
    CHECK(squarer_from_eps(0.25).m == 1);
    Network g = squarer_network(squarer_from_eps(1e-3));
    for (double x : uniform_grid(0.0, 1.0, 700))
        CHECK(std::fabs(evaluate(g, {x})[0] - x * x) <= 1e-3);
}

TEST_CASE("multiplier meets its bound and zero-kills axes") {
    MultiplierSpec spec{1.0, 1e-2};
    Network mul = multiplier_network(spec);
    CHECK(spec.delta > 0.0);
    for (double x : uniform_grid(-1.0, 1.0, 60))
        for (double y : uniform_grid(-1.0, 1.0, 60))
            CHECK(std::fabs(evaluate(mul, {x, y})[0] - x * y) <= 1e-2);
    for (double t : uniform_grid(-1.0, 1.0, 50)) {
        CHECK(evaluate(mul, {t, 0.0})[0] == 0.0);
        CHECK(evaluate(mul, {0.0, t})[0] == 0.0);
    }
    std::size_t m = squarer_from_eps(spec.delta).m;
    CHECK(complexity(mul).total_neurons == 12 * m + 9);
}

TEST_CASE("product network") {
    Network base = pou_network({{1, 1}, 2, 2}); // phi factors of the (1,1)/2 cell
    CHECK_NOTHROW(product_network(base, 1e-3));
    Network prod = product_network(base, 1e-3);
    CHECK(prod.output_dim() == 1);
    std::size_t mfac = base.output_dim();
    auto exact = [&](const Vec& x) {
        double p = 1.0;
        for (double v : evaluate(base, x)) p *= v;
        return p;
    };
    for (double x : uniform_grid(0.0, 1.0, 25))
        for (double y : uniform_grid(0.0, 1.0, 25))
            CHECK(std::fabs(evaluate(prod, {x, y})[0] - exact({x, y})) <= double(mfac) * 1e-3);
}

TEST_CASE("product of one factor is the factor itself") {
    Network h = hat_network();
    Network p = product_network(h, 1e-3);
    for (double x : uniform_grid(0.0, 1.0, 100))
        CHECK(evaluate(p, {x})[0] == evaluate(h, {x})[0]);
}

TEST_CASE("product network rejects out-of-range factors") {
    Network big = hat_network();
    for (double& v : big.layers.back().weights.a) v *= 3.0; // peaks at 3
    CHECK_THROWS_AS(product_network(concat(big, hat_network()), 1e-3), FactorOutOfRange);
}

TEST_CASE("partition-of-unity factor values") {
    PoUIndex idx{{1}, 2, 1}; // center 1/2, n = 2
    Network f = pou_scalar_network(0, idx);
    CHECK(evaluate(f, {0.5})[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(f, {0.5 + 1.0 / 6.0})[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(evaluate(f, {0.5 + 0.25})[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(evaluate(f, {0.5 + 1.0 / 3.0})[0] == doctest::Approx(0.0).epsilon(1e-13));
    Network d2 = pou_network({{1, 0}, 2, 2});
    CHECK(complexity(d2).nonzero_params == 24); // 12 per coordinate
    Vec v = evaluate(d2, {0.5, 0.0});
    CHECK(v[0] * v[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("monomial selector") {
    Network sel = monomial_selector(MultiIndex{{2, 1}}, 2);
    Vec v = evaluate(sel, {0.5, 0.4});
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 0.5);
    CHECK(v[1] == 0.5);
    CHECK(v[2] == 0.4);
    Network one = monomial_selector(MultiIndex{{0, 0}}, 2);
    CHECK(evaluate(one, {0.3, 0.9})[0] == 1.0);
}

TEST_CASE("sobolev assembly reproduces simple targets") {
    std::size_t n = 2;
    // f(x) = x: local polys are exact, so the net is within the product tolerance
    std::vector<LocalPolynomial> polys;
    for (std::size_t m0 = 0; m0 <= n; ++m0) {
        LocalPolynomial p;
        p.center = PoUIndex{{m0}, n, 1};
        p.coeffs[MultiIndex{{0}}] = 0.0;
        p.coeffs[MultiIndex{{1}}] = 1.0;
        polys.push_back(p);
    }
    double eps = 1e-3;
    Network net = sobolev_network(polys, n, eps);
    for (double x : uniform_grid(0.0, 1.0, 300))
        CHECK(std::fabs(evaluate(net, {x})[0] - x) <= 10 * eps);

    // constant 1: sum of the bumps is a partition of unity, reproduced exactly
    for (auto& p : polys) {
        p.coeffs.clear();
        p.coeffs[MultiIndex{{0}}] = 1.0;
    }
    Network unit = sobolev_network(polys, n, eps);
    for (double x : uniform_grid(0.0, 1.0, 300))
        CHECK(std::fabs(evaluate(unit, {x})[0] - 1.0) <= 1e-12);
}
