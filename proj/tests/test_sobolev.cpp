#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reluforge/grid.hpp"
#include "reluforge/sobolev.hpp"

using namespace reluforge;

namespace {
DerivativeOracle oracle_1d(std::function<double(std::size_t, double)> dk) {
    DerivativeOracle f;
    f.d = 1;
    f.deriv = [dk](const MultiIndex& a, const Vec& x) { return dk(a.a[0], x[0]); };
    return f;
}
} // namespace

TEST_CASE("bump profile") {
    CHECK(psi(0.0) == 1.0);
    CHECK(psi(0.99) == 1.0);
    CHECK(psi(2.5) == 0.0);
    CHECK(psi(-2.0) == 0.0);
    CHECK(psi(-1.25) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(psi(1.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("grid bump phi") {
    PoUIndex idx{{2}, 5, 1};
    CHECK(phi(idx, {0.4}) == 1.0);
    CHECK(phi(idx, {0.5}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(phi(idx, {0.6}) == 0.0);
}

TEST_CASE("multi index enumeration") {
    auto idx = multi_indices_upto(2, 2);
    CHECK(idx.size() == 6); // {00,10,01,20,11,02}
    for (const auto& a : idx) CHECK(a.order() <= 2);
}

TEST_CASE("local taylor data") {
    // f = x^2 around 1/2, order <= k-1 with k = 3: exact
    auto f = oracle_1d([](std::size_t k, double x) {
        if (k == 0) return x * x;
        if (k == 1) return 2.0 * x;
        if (k == 2) return 2.0;
        return 0.0;
    });
    LocalPolynomial p = taylor_local(f, PoUIndex{{1}, 2, 1}, 3);
    for (double x : uniform_grid(0.0, 1.0, 50))
        CHECK(eval_poly(p, {x}) == doctest::Approx(x * x).epsilon(1e-14));

    // e^x with k = 2 keeps terms through degree 1: 1 + x at the origin
    auto g = oracle_1d([](std::size_t, double x) { return std::exp(x); });
    LocalPolynomial q = taylor_local(g, PoUIndex{{0}, 2, 1}, 2);
    CHECK(eval_poly(q, {0.25}) == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("piecewise taylor blend converges at the smooth rate") {
    auto f = oracle_1d([](std::size_t k, double x) {
        double s = std::pow(2.0 * M_PI, double(k));
        switch (k % 4) {
            case 0: return s * std::sin(2.0 * M_PI * x);
            case 1: return s * std::cos(2.0 * M_PI * x);
            case 2: return -s * std::sin(2.0 * M_PI * x);
            default: return -s * std::cos(2.0 * M_PI * x);
        }
    });
    GlobalApprox a8 = global_approx(f, 8, 2);
    GlobalApprox a16 = global_approx(f, 16, 2);
    auto fx = [&](const Vec& x) { return f(x); };
    double e8 = lp_error(fx, [&](const Vec& x) { return a8(x); }, INFINITY, 1, 2000);
    double e16 = lp_error(fx, [&](const Vec& x) { return a16(x); }, INFINITY, 1, 2000);
    double ratio = e8 / e16;
    CHECK(ratio >= 3.0); // k = 2 => rate n^{-2}, ratio near 4
    CHECK(ratio <= 5.0);

    // linear targets are reproduced exactly
    auto lin = oracle_1d([](std::size_t k, double x) {
        if (k == 0) return 3.0 * x - 1.0;
        if (k == 1) return 3.0;
        return 0.0;
    });
    GlobalApprox al = global_approx(lin, 4, 2);
    for (double x : uniform_grid(0.0, 1.0, 200))
        CHECK(al({x}) == doctest::Approx(3.0 * x - 1.0).epsilon(1e-13));
}

TEST_CASE("lp gap values") {
    auto zero = [](const Vec&) { return 0.0; };
    auto one = [](const Vec&) { return 1.0; };
    CHECK(lp_error(one, zero, INFINITY, 1, 100) == doctest::Approx(1.0));
    CHECK(lp_error(one, zero, 2.0, 1, 500) == doctest::Approx(1.0).epsilon(1e-10));
    auto lin = [](const Vec& x) { return x[0]; };
    CHECK(lp_error(lin, zero, INFINITY, 1, 1000) == doctest::Approx(1.0));
    // ||x||_2 on [0,1] = 1/sqrt(3)
    CHECK(lp_error(lin, zero, 2.0, 1, 2000) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
    CHECK(lp_error(one, zero, INFINITY, 2, 30) == doctest::Approx(1.0));
}

TEST_CASE("bernstein polynomials") {
    Bernstein b = bernstein([](double x) { return x * (1.0 - x); }, 20);
    // B_m[x(1-x)] = (1 - 1/m) x(1-x)
    for (double x : uniform_grid(0.0, 1.0, 100))
        CHECK(b(x) == doctest::Approx((1.0 - 1.0 / 20.0) * x * (1.0 - x)).epsilon(1e-12));
    Bernstein c = bernstein([](double) { return 1.0; }, 15);
    for (double x : uniform_grid(0.0, 1.0, 50))
        CHECK(c(x) == doctest::Approx(1.0).epsilon(1e-13));
    Bernstein e = bernstein([](double x) { return std::sin(x); }, 10);
    CHECK(e(0.0) == doctest::Approx(std::sin(0.0)).epsilon(1e-15));
    CHECK(e(1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
}

TEST_CASE("end-to-end approximation of a constant") {
    auto f = oracle_1d([](std::size_t k, double) { return k == 0 ? 0.5 : 0.0; });
    SobolevResult r = approximate_sobolev(f, 2, INFINITY, 0.05);
    CHECK(r.measured_error <= 0.05);
    CHECK(r.slack <= 1.0);
    for (double x : uniform_grid(0.0, 1.0, 100))
        CHECK(std::fabs(evaluate(r.net, {x})[0] - 0.5) <= 0.05);
}
