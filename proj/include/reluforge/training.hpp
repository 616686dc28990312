#pragma once

#include <optional>
#include <string>

#include "network.hpp"

namespace reluforge {

struct Dataset {
    std::vector<Vec> inputs;
    std::vector<Vec> targets;
};
// one row per sample, input columns then target columns
Dataset load_dataset_csv(const std::string& path, std::size_t input_dim);

enum class LossKind { quadratic, cross_entropy };

struct Regularizer {
    enum class Kind { none, l1, l2 } kind = Kind::none;
    double lambda = 0.0;
};

struct EarlyStopping {
    std::size_t patience = 5;
    double validation_split = 0.2;
};

struct TrainConfig {
    double eta = 0.1;
    std::size_t batch_size = 16;
    std::size_t epochs = 10;
    Regularizer reg;
    LossKind loss = LossKind::quadratic;
    std::optional<EarlyStopping> early;
    unsigned seed = 42;
};

struct Gradients {
    std::vector<Mat> dW;
    std::vector<Vec> db;
    void add(const Gradients& o, double scale);
};

struct TrainState {
    Network net;
    Trace cache;             // z/a per layer from the latest forward pass
    std::vector<Vec> delta;  // sensitivities after backprop
    bool fresh = false;      // cache matches the current parameters and input
};

Vec forward_cached(TrainState& st, const Vec& x);
double loss_value(LossKind kind, const Vec& y, const Vec& aL);
Gradients backprop(TrainState& st, const Vec& x, const Vec& y, LossKind kind);

// max relative backprop-vs-central-difference discrepancy, skipping parameters
// whose perturbation crosses or touches a ReLU kink
double grad_check(TrainState& st, const Vec& x, const Vec& y, LossKind kind, double h = 1e-5);

// seeded uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization
Network random_network(std::size_t input_dim, const std::vector<std::size_t>& hidden_widths,
                       std::size_t output_dim, unsigned seed, Act hidden = Act::relu,
                       Act output = Act::identity);

struct TrainResult {
    Network net;
    Vec train_loss; // per epoch, data term only
    Vec val_loss;   // per epoch when early stopping is active
    std::size_t epochs_run = 0;
};
TrainResult sgd_train(const Network& net, const Dataset& data, const TrainConfig& cfg);

} // namespace reluforge
