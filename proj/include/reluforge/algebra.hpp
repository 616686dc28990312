#pragma once

#include <utility>

#include "network.hpp"

namespace reluforge {

struct ShiftCertificate {
    Vec C; // per hidden layer, lower-bound shift for the collation input
};

struct Box {
    Vec lo, hi;
};

// Phi_I(x) = x via sigma(x) - sigma(-x), width 2d.
Network identity_network(std::size_t d);

// Connected network realizing outer(inner(x)) with the +/- duplication of the
// inner output layer. L = L1 + L2, N <= 2(N1+N2), P <= 2(P1+P2).
Network compose(const Network& outer, const Network& inner);

// Standard-network composition merging at the seam: the seam weight block is
// (outer first-layer weights) * (inner output weights); no width doubling.
Network compose_merge(const Network& outer, const Network& inner);

// (a(x), b(x)) as a connected network; L = max, N = N1+N2-d, P = P1+P2.
Network concat(const Network& a, const Network& b);
Network concat_many(const std::vector<Network>& nets);

// Re-encode a standard net as connected with zero off-diagonal blocks.
Network as_connected(const Network& net);

// Standard network with identical outputs; forwarded values are carried via
// sigma(u)-sigma(-u) pairs (input) or directly (nonnegative ReLU outputs),
// each only until its last use.
Network connected_to_standard(const Network& c);

// Realize the ReLU-free collation channel by shifting it up with per-layer
// constants C_l (grid minimum x 1.1) and subtracting their sum at the output.
std::pair<Network, ShiftCertificate> special_to_standard(const Network& s, const Box& domain);

// Re-check a certificate on fresh random points in the domain.
bool certificate_holds(const Network& s, const Box& domain, const ShiftCertificate& cert,
                       std::size_t npoints, unsigned seed);

// Special net of depth L1+L2 with output a(x)+b(x): b's first collation
// neuron receives a's output instead of zero.
Network special_add(const Network& a, const Network& b);

// Wrap a standard univariate net with fresh source/collation channels (width +2).
Network lift_with_channels(const Network& phi);

} // namespace reluforge
