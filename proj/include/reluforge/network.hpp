#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "activation.hpp"
#include "matrix.hpp"

namespace reluforge {

enum class Kind { standard, connected, special };

struct LinearLayer {
    Mat weights;        // rows = fan-out, cols = fan-in
    Vec bias;           // length = fan-out
    Activation act;     // applied after the affine map (output layers use identity)

    std::size_t fan_out() const { return weights.rows; }
    std::size_t fan_in() const { return weights.cols; }
};

// Per hidden layer, row indices of the ReLU-free source (top) and
// collation (bottom) channels of a special network.
struct ChannelMeta {
    std::vector<std::size_t> source;
    std::vector<std::size_t> collation;
};

struct Network {
    Kind kind = Kind::standard;
    std::size_t input_dim = 0;
    std::vector<LinearLayer> layers; // last layer is the output layer
    ChannelMeta channel_meta;        // meaningful only for kind == special

    std::size_t output_dim() const { return layers.back().fan_out(); }
    std::size_t n_hidden() const { return layers.size() - 1; }
};

struct ComplexityReport {
    std::size_t hidden_layers = 0; // L in the depth-as-hidden convention
    std::size_t total_layers = 0;  // affine maps including the output layer
    std::size_t total_neurons = 0; // N: input + hidden + output
    std::size_t nonzero_params = 0; // P as exact nonzero count
    std::size_t param_slots = 0;    // n_theta = sum n_l (n_{l-1} + 1)
    std::size_t width = 0;          // max hidden fan-out
    // W(W+1)L - (W-1)^2 + 2 for uniform-width standard 1-in/1-out nets, else 0
    std::size_t closed_form_n = 0;
};

Vec evaluate(const Network& net, const Vec& x);

// Forward pass keeping every layer's post-activation output and, on request,
// the raw pre-activations. Used by algebra conversions and training.
struct Trace {
    std::vector<Vec> pre;  // z^l per layer
    std::vector<Vec> post; // a^l per layer (output layer: final output)
};
Trace evaluate_traced(const Network& net, const Vec& x);

std::vector<std::string> validate(const Network& net);
ComplexityReport complexity(const Network& net);

// Throws std::invalid_argument listing the violations when validate fails.
void require_valid(const Network& net);

// Closed-form parameter-slot count n(W,L) of a width-W, L-hidden-layer,
// 1-in/1-out standard architecture.
inline std::size_t n_of_WL(std::size_t W, std::size_t L) {
    return W * (W + 1) * L - (W - 1) * (W - 1) + 2;
}

} // namespace reluforge
