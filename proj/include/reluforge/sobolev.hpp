#pragma once

#include <functional>

#include "constructions.hpp"
#include "network.hpp"

namespace reluforge {

// D^alpha f(x) for |alpha| <= k on [0,1]^d
struct DerivativeOracle {
    std::size_t d = 1;
    std::function<double(const MultiIndex&, const Vec&)> deriv;
    double operator()(const Vec& x) const {
        return deriv(MultiIndex{std::vector<std::size_t>(d, 0)}, x);
    }
};

double psi(double z);                       // plateau bump: 1 on |z|<1, 0 on |z|>2
double phi(const PoUIndex& idx, const Vec& x);

std::vector<MultiIndex> multi_indices_upto(std::size_t d, std::size_t max_order);

// p_m as global-basis coefficients: Taylor at m/n of order k-1, binomially re-expanded
LocalPolynomial taylor_local(const DerivativeOracle& f, const PoUIndex& idx, std::size_t k);

double eval_poly(const LocalPolynomial& p, const Vec& x);

struct GlobalApprox {
    std::size_t n = 1, d = 1;
    std::vector<LocalPolynomial> polys; // all (n+1)^d cells, odometer order
    double operator()(const Vec& x) const;
};
GlobalApprox global_approx(const DerivativeOracle& f, std::size_t n, std::size_t k);

// composite-trapezoid L^p gap on [0,1]^d (d <= 2); p = inf -> grid max
double lp_error(const std::function<double(const Vec&)>& f,
                const std::function<double(const Vec&)>& g, double p, std::size_t d,
                std::size_t pts_per_dim);

struct Bernstein {
    std::size_t m = 1;
    Vec fv;   // f(k/m)
    Vec binom; // C(m,k)
    double operator()(double x) const;
};
Bernstein bernstein(const std::function<double(double)>& f, std::size_t m);

struct SobolevResult {
    Network net;            // standard form
    std::size_t n = 0;      // chosen grid
    double eps_term = 0.0;  // per-product accuracy handed to the builders
    double fn_error = 0.0;  // measured f vs f_n gap
    double measured_error = 0.0;
    double slack = 0.0;     // measured / eps
};
SobolevResult approximate_sobolev(const DerivativeOracle& f, std::size_t k, double p, double eps);

} // namespace reluforge
