#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "matrix.hpp"

namespace reluforge {

enum class Act {
    relu,
    leaky_relu,      // slope alpha for x<0
    parametric_relu, // same form, learnable alpha kept as a fixed tag value here
    relu6,
    sigmoid,
    tanh_,
    identity,
    softmax, // vector-valued; only valid as an output-layer tag
};

struct Activation {
    Act tag = Act::relu;
    double alpha = 0.01; // used by leaky/parametric relu

    double value(double x) const {
        switch (tag) {
            case Act::relu: return x > 0.0 ? x : 0.0;
            case Act::leaky_relu:
            case Act::parametric_relu: return x > 0.0 ? x : alpha * x;
            case Act::relu6: return std::min(std::max(0.0, x), 6.0);
            case Act::sigmoid: return 1.0 / (1.0 + std::exp(-x));
            case Act::tanh_: return std::tanh(x);
            case Act::identity: return x;
            case Act::softmax:
                throw std::logic_error("softmax has no scalar value map");
        }
        return x;
    }

    // derivative wrt pre-activation; relu'(0) := 1 so backprop is deterministic
    double deriv(double x) const {
        switch (tag) {
            case Act::relu: return x >= 0.0 ? 1.0 : 0.0;
            case Act::leaky_relu:
            case Act::parametric_relu: return x >= 0.0 ? 1.0 : alpha;
            case Act::relu6: return (x >= 0.0 && x <= 6.0) ? 1.0 : 0.0;
            case Act::sigmoid: {
                double s = value(x);
                return s * (1.0 - s);
            }
            case Act::tanh_: {
                double t = std::tanh(x);
                return 1.0 - t * t;
            }
            case Act::identity: return 1.0;
            case Act::softmax:
                throw std::logic_error("softmax derivative is a Jacobian; handled in backprop");
        }
        return 1.0;
    }
};

inline Vec softmax_vec(const Vec& z) {
    double m = *std::max_element(z.begin(), z.end());
    Vec out(z.size());
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - m);
        s += out[i];
    }
    for (auto& v : out) v /= s;
    return out;
}

inline std::string act_name(Act a) {
    switch (a) {
        case Act::relu: return "relu";
        case Act::leaky_relu: return "leaky_relu";
        case Act::parametric_relu: return "parametric_relu";
        case Act::relu6: return "relu6";
        case Act::sigmoid: return "sigmoid";
        case Act::tanh_: return "tanh";
        case Act::identity: return "identity";
        case Act::softmax: return "softmax";
    }
    return "relu";
}

inline Act act_from_name(const std::string& s) {
    if (s == "relu") return Act::relu;
    if (s == "leaky_relu") return Act::leaky_relu;
    if (s == "parametric_relu") return Act::parametric_relu;
    if (s == "relu6") return Act::relu6;
    if (s == "sigmoid") return Act::sigmoid;
    if (s == "tanh") return Act::tanh_;
    if (s == "identity") return Act::identity;
    if (s == "softmax") return Act::softmax;
    throw std::invalid_argument("unknown activation: " + s);
}

} // namespace reluforge
