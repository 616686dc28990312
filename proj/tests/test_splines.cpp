#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "reluforge/grid.hpp"
#include "reluforge/splines.hpp"

using namespace reluforge;

namespace {
FreeKnotSpline random_spline(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec bp(n), vals(n + 2);
    for (std::size_t i = 0; i < n; ++i) bp[i] = (double(i) + 0.2 + 0.6 * u(rng)) / double(n + 1);
    for (auto& v : vals) v = 2.0 * u(rng) - 1.0;
    return make_spline(bp, vals);
}

double sup_gap(const FreeKnotSpline& S, const Network& net, std::size_t pts) {
    double worst = 0.0;
    for (double x : uniform_grid(0.0, 1.0, pts))
        worst = std::max(worst, std::fabs(eval_spline(S, x) - evaluate(net, {x})[0]));
    return worst;
}
} // namespace

TEST_CASE("spline evaluation") {
    FreeKnotSpline S = make_spline({0.25, 0.75}, {0.0, 1.0, -1.0, 0.0});
    CHECK(eval_spline(S, 0.25) == 1.0);
    CHECK(eval_spline(S, 0.75) == -1.0);
    CHECK(eval_spline(S, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_spline(S, 0.125) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS(make_spline({0.5, 0.25}, {0.0, 1.0, 1.0, 0.0})); // unsorted
}

TEST_CASE("shallow embedding and its inverse") {
    FreeKnotSpline hat = make_spline({0.5}, {0.0, 1.0, 0.0});
    Network sh = spline_to_shallow(hat, 8);
    for (double x : uniform_grid(0.0, 1.0, 200))
        CHECK(std::fabs(evaluate(sh, {x})[0] - eval_spline(hat, x)) <= 1e-14);
    FreeKnotSpline back = network_to_spline(sh);
    CHECK(back.breakpoints.size() == 1);
    CHECK(back.breakpoints[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(back.values[1] == doctest::Approx(1.0).epsilon(1e-13));

    std::mt19937 rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        FreeKnotSpline S = random_spline(6, rng);
        Network net = spline_to_shallow(S, 8);
        CHECK(sup_gap(S, net, 2000) <= 1e-12);
        FreeKnotSpline rt = network_to_spline(net);
        for (double x : uniform_grid(0.0, 1.0, 500))
            CHECK(std::fabs(eval_spline(rt, x) - eval_spline(S, x)) <= 1e-12);
    }
}

TEST_CASE("hat basis decomposition") {
    std::mt19937 rng(21);
    std::size_t W = 8, M = 6; // q = 1
    FreeKnotSpline S = random_spline(M, rng);
    Vec xs(M + 2);
    xs[0] = 0.0;
    for (std::size_t i = 0; i < M; ++i) xs[i + 1] = S.breakpoints[i];
    xs[M + 1] = 1.0;
    Vec vals = S.values;
    vals.front() = vals.back() = 0.0; // decomposition wants vanishing ends
    BasisDecomposition D = decompose_basis_nodes(xs, vals, W);
    CHECK(D.groups.size() <= 6); // sign-pure, 3-separated
    auto recon = [&](double x) {
        double s = 0.0;
        for (std::size_t k = 1; k <= D.M; ++k) s += D.coeffs[k - 1] * eval_basis_hat(D, k, x);
        return s;
    };
    for (std::size_t t = 1; t <= M; ++t)
        CHECK(recon(xs[t]) == doctest::Approx(vals[t]).epsilon(1e-12));

    // one basis hat on its own lands in a single group
    Vec one(M + 2, 0.0);
    for (std::size_t t = 0; t < M + 2; ++t) one[t] = eval_basis_hat(D, 3, xs[t]);
    BasisDecomposition D1 = decompose_basis_nodes(xs, one, W);
    std::size_t members = 0;
    for (const auto& g : D1.groups)
        for (std::size_t k : g.ks) {
            ++members;
            if (members == 1) CHECK(std::fabs(D1.coeffs[k - 1]) > 0.5);
        }
    CHECK(members == 1);
}

TEST_CASE("wide decomposition reconstructs on a fine grid") {
    std::mt19937 rng(31);
    std::size_t W = 14, M = 24; // q = 2
    FreeKnotSpline S = random_spline(M, rng);
    Vec xs(M + 2);
    xs[0] = 0.0;
    for (std::size_t i = 0; i < M; ++i) xs[i + 1] = S.breakpoints[i];
    xs[M + 1] = 1.0;
    Vec vals = S.values;
    vals.front() = vals.back() = 0.0;
    BasisDecomposition D = decompose_basis_nodes(xs, vals, W);
    for (double x : uniform_grid(0.0, 1.0, 4000)) {
        double s = 0.0;
        for (std::size_t k = 1; k <= D.M; ++k) s += D.coeffs[k - 1] * eval_basis_hat(D, k, x);
        double want = 0.0;
        // exact piecewise-linear interpolant of the node values
        for (std::size_t t = 0; t + 1 < xs.size(); ++t)
            if (x >= xs[t] && x <= xs[t + 1]) {
                double lam = (x - xs[t]) / (xs[t + 1] - xs[t]);
                want = (1.0 - lam) * vals[t] + lam * vals[t + 1];
                break;
            }
        CHECK(std::fabs(s - want) <= 1e-12);
    }
    // groups deliver sign * sigma(g_p)
    for (std::size_t p = 0; p < D.groups.size(); ++p) {
        GroupPL g = build_gp(D, p);
        for (double x : uniform_grid(0.0, 1.0, 800)) {
            double direct = 0.0;
            for (std::size_t k : D.groups[p].ks)
                direct += D.coeffs[k - 1] * eval_basis_hat(D, k, x);
            double via = double(g.sign) * std::max(0.0, g.eval(x));
            CHECK(std::fabs(direct - via) <= 1e-12);
        }
    }
}

TEST_CASE("two-layer block embedding") {
    std::mt19937 rng(41);
    for (std::size_t W : {8u, 14u}) {
        std::size_t M = ((W - 2) / 6) * (W - 2);
        FreeKnotSpline S = random_spline(M, rng);
        Vec xs(M + 2);
        xs[0] = 0.0;
        for (std::size_t i = 0; i < M; ++i) xs[i + 1] = S.breakpoints[i];
        xs[M + 1] = 1.0;
        Vec vals = S.values;
        vals.front() = vals.back() = 0.0;
        Network net = embed_S0_nodes(xs, vals, W);
        CHECK(net.kind == Kind::special);
        CHECK(net.n_hidden() == 2);
        for (double x : uniform_grid(0.0, 1.0, 2000)) {
            double want = 0.0;
            for (std::size_t t = 0; t + 1 < xs.size(); ++t)
                if (x >= xs[t] && x <= xs[t + 1]) {
                    double lam = (x - xs[t]) / (xs[t + 1] - xs[t]);
                    want = (1.0 - lam) * vals[t] + lam * vals[t + 1];
                    break;
                }
            CHECK(std::fabs(evaluate(net, {x})[0] - want) <= 1e-12);
        }
    }
    // all-zero values embed to the zero function
    Vec xs{0.0, 0.2, 0.4, 0.55, 0.7, 0.8, 0.9, 1.0};
    Network z = embed_S0_nodes(xs, Vec(8, 0.0), 8);
    for (double x : uniform_grid(0.0, 1.0, 200)) CHECK(std::fabs(evaluate(z, {x})[0]) <= 1e-14);
}

TEST_CASE("deep embedding of a long spline") {
    std::mt19937 rng(51);
    std::size_t W = 8, M = 6, L = 3;
    FreeKnotSpline S = random_spline(M * L, rng);
    Network net = embed_spline(S, W);
    CHECK(net.kind == Kind::special);
    CHECK(net.n_hidden() == 2 * L);
    CHECK(complexity(net).width == W);
    CHECK(sup_gap(S, net, 5000) <= 1e-11);
}

TEST_CASE("knot padding is inert") {
    FreeKnotSpline S = make_spline({0.3, 0.6}, {0.0, 1.0, 0.5, 0.0});
    FreeKnotSpline P = pad_spline(S, 9);
    CHECK(P.breakpoints.size() == 9);
    for (double x : uniform_grid(0.0, 1.0, 1000))
        CHECK(std::fabs(eval_spline(P, x) - eval_spline(S, x)) <= 1e-14);
}

TEST_CASE("full pipeline with complexity certificate") {
    std::mt19937 rng(61);
    {
        FreeKnotSpline S = random_spline(3, rng);
        auto [net, rep] = theorem1(S, 8);
        CHECK(rep.closed_form_n == 97); // W^2 + 4W + 1 at depth 2
        CHECK(rep.hidden_layers == 2);
        for (double x : uniform_grid(0.0, 1.0, 2000))
            CHECK(std::fabs(evaluate(net, {x})[0] - eval_spline(S, x)) <= 1e-10);
    }
    {
        FreeKnotSpline S = random_spline(100, rng);
        auto [net, rep] = theorem1(S, 14);
        CHECK(rep.hidden_layers == 10); // ceil(100/24) = 5 blocks
        CHECK(rep.closed_form_n <= 61 * 100);
        for (double x : uniform_grid(0.0, 1.0, 5000))
            CHECK(std::fabs(evaluate(net, {x})[0] - eval_spline(S, x)) <= 1e-10);
    }
}

TEST_CASE("spline file round trip") {
    FreeKnotSpline S = make_spline({0.25, 0.5}, {0.1, -0.3, 0.7, 0.2});
    std::string path = "test_spline_tmp.json";
    save_spline(S, path);
    FreeKnotSpline T = load_spline(path);
    std::remove(path.c_str());
    REQUIRE(T.breakpoints.size() == S.breakpoints.size());
    for (std::size_t i = 0; i < S.breakpoints.size(); ++i)
        CHECK(T.breakpoints[i] == S.breakpoints[i]);
    for (std::size_t i = 0; i < S.values.size(); ++i) CHECK(T.values[i] == S.values[i]);
}
