#pragma once

#include <string>
#include <utility>

#include "network.hpp"

namespace reluforge {

// continuous piecewise-linear function on [0,1]; values at 0, each breakpoint, 1
struct FreeKnotSpline {
    Vec breakpoints;
    Vec values;
};

FreeKnotSpline make_spline(Vec breakpoints, Vec values); // validates
double eval_spline(const FreeKnotSpline& S, double x);

void save_spline(const FreeKnotSpline& S, const std::string& path);
FreeKnotSpline load_spline(const std::string& path);

// one-hidden-layer net, S(x) = a x + b + sum m_j sigma(x - x_j); needs n <= W-1
Network spline_to_shallow(const FreeKnotSpline& S, std::size_t W);
FreeKnotSpline network_to_spline(const Network& phi);

// hat-basis decomposition of a spline vanishing at both ends of its node list
struct BasisDecomposition {
    std::size_t W = 8, q = 1, M = 6;
    Vec xs;     // M+2 nodes including both ends
    Vec coeffs; // c_k at index k-1, k = 1..M
    struct Group {
        int sign = 1;          // common coefficient sign
        std::size_t i = 1;     // hat shape index
        std::vector<std::size_t> ks; // members, principal indices 3-separated
    };
    std::vector<Group> groups;
    // k = j*q - i + 1 with j = ceil(k/q), i = j*q - k + 1
    std::size_t j_of(std::size_t k) const { return (k - 1) / q + 1; }
    std::size_t i_of(std::size_t k) const { return j_of(k) * q - k + 1; }
};

double eval_basis_hat(const BasisDecomposition& D, std::size_t k, double x);
BasisDecomposition decompose_basis_nodes(const Vec& xs, const Vec& vals, std::size_t W);
BasisDecomposition decompose_basis(const FreeKnotSpline& S0, std::size_t W);

// g_p: piecewise-linear with kinks only at the principal breakpoints; the
// group's contribution is sign * sigma(g_p)
struct GroupPL {
    int sign = 1;
    double v0 = 0.0; // value at x = 0
    Vec xi;          // principal breakpoints (W-2)
    Vec slopes;      // W-1 segment slopes, last one extends past xi.back()
    double eval(double x) const;
};
GroupPL build_gp(const BasisDecomposition& D, std::size_t p);

Network embed_S0_nodes(const Vec& xs, const Vec& vals, std::size_t W); // special, depth 2
Network embed_S0(const FreeKnotSpline& S0, std::size_t W);

// depth-2L special net for a spline with exactly q(W-2)L knots
Network embed_spline(const FreeKnotSpline& S, std::size_t W);

// insert inert knots (midpoints of the widest gaps) up to target count
FreeKnotSpline pad_spline(const FreeKnotSpline& S, std::size_t target_knots);

// depth choice + embedding + standard conversion + complexity certificate
std::pair<Network, ComplexityReport> theorem1(const FreeKnotSpline& S, std::size_t W);

} // namespace reluforge
