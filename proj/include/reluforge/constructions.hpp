#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "network.hpp"

namespace reluforge {

// thrown when a factor handed to product_network exceeds [-1,1] on the cube
struct FactorOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SquarerSpec {
    std::size_t m = 1;
    double target_eps = 0.0; // informational when m was derived from eps
};
SquarerSpec squarer_from_eps(double eps);

struct MultiplierSpec {
    double D = 1.0;
    double eps = 1e-3;
    double delta = 0.0; // filled in by the builder: eps / (6 D^2 C0)
    double C0 = 1.0;
};

struct PoUIndex {
    std::vector<std::size_t> m; // in {0..n}^d
    std::size_t n = 1;
    std::size_t d = 1;
};

struct MultiIndex {
    std::vector<std::size_t> a;
    std::size_t order() const {
        std::size_t s = 0;
        for (auto v : a) s += v;
        return s;
    }
    bool operator<(const MultiIndex& o) const { return a < o.a; }
};

struct LocalPolynomial {
    PoUIndex center;
    std::map<MultiIndex, double> coeffs; // global-basis coefficients c_{m,alpha}
};

Network hat_network();                       // width-3 hat, exact on all of R
Network hat_network_m21();                   // 2sigma(x)-4sigma(x-1/2), the M_{2,1} hat on [0,1]
Network sawtooth_network(std::size_t s);     // h_s with 2^{s-1} teeth
Network squarer_network(const SquarerSpec&); // dyadic interpolant g_m of x^2

// Filled-in spec (delta, possibly tightened) is written back.
Network multiplier_network(MultiplierSpec& spec);
inline Network multiplier_network(MultiplierSpec&& spec) {
    MultiplierSpec s = spec;
    return multiplier_network(s);
}

// One-output net approximating the product of the base net's outputs
// (each bounded by 1 on [0,1]^d) within m*eps.
Network product_network(const Network& base, double eps);

Network pou_scalar_network(std::size_t i, const PoUIndex& idx); // psi(3n(x_i - m_i/n)), 1-input
Network pou_network(const PoUIndex& idx);                       // d outputs, product = phi_m
Network monomial_selector(const MultiIndex& alpha, std::size_t d);

// Phi_sum over the product nets Psi_{m,alpha} weighted by the local coefficients.
Network sobolev_network(const std::vector<LocalPolynomial>& local_polys, std::size_t n,
                        double eps);

} // namespace reluforge
