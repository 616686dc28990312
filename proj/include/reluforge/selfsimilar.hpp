#pragma once

#include <utility>

#include "network.hpp"

namespace reluforge {

struct TakagiSpec {
    double base = 2.0;   // geometric rule a_k = base^{-k}, |base| > 1
    Vec explicit_coeffs; // overrides the geometric rule when non-empty
    std::size_t depth = 4;

    double coeff(std::size_t k) const; // a_k, k >= 1
    double tail_bound(std::size_t K) const;
};

// T composed with itself k times via seam merging; depth k * L(T)
Network compose_power(const Network& T, std::size_t k);

// special net of width W+2 and depth m*L computing sum_i a_i T^(i)
Network weighted_composition_sum(const Network& T, const Vec& a);

// special net of width W1+W2+2 and depth (m+1)*L computing sum_i a_i g(T^(i));
// T and g must have the same hidden depth
Network weighted_g_composition_sum(const Network& T, const Network& g, const Vec& a);

Network takagi_network(const TakagiSpec& spec); // width-4 special net, sum_{k<=depth} a_k H^(k)

// oracle by iterating the closed-form hat; K >= spec.depth terms
double takagi_reference(const TakagiSpec& spec, double x, std::size_t K);

struct RateFit {
    double base = 0.0;     // per-level decay factor
    double C = 0.0;        // fitted constant, err ~ C * base^{-depth}
    double residual = 0.0; // rms residual of the log-linear fit
};
RateFit rate_fit(const std::vector<std::pair<std::size_t, double>>& errors);

} // namespace reluforge
