#pragma once

#include <functional>
#include <vector>

#include "network.hpp"

namespace reluforge {

// Uniform grid with n+1 points over [lo, hi].
Vec uniform_grid(double lo, double hi, std::size_t n);

// Thread cap: min(omp max threads, RELU_FORGE_THREADS if set).
int grid_threads();

// OpenMP-parallel batch forward pass; one output vector per input point.
std::vector<Vec> evaluate_batch(const Network& net, const std::vector<Vec>& xs);
// Serial reference implementation, kept for testing the parallel kernel.
std::vector<Vec> evaluate_batch_serial(const Network& net, const std::vector<Vec>& xs);

// sup_i |net(xs_i)[out] - f(xs_i)|, parallel and serial variants.
double sup_error(const Network& net, const std::function<double(const Vec&)>& f,
                 const std::vector<Vec>& xs, std::size_t out = 0);
double sup_error_serial(const Network& net, const std::function<double(const Vec&)>& f,
                        const std::vector<Vec>& xs, std::size_t out = 0);

// Convenience: 1-D sup error over a uniform grid on [lo, hi] with n+1 points.
double sup_error_1d(const Network& net, const std::function<double(double)>& f,
                    double lo, double hi, std::size_t n);

// Tensor grid over [0,1]^d with (n+1)^d points (d <= 3 in practice).
std::vector<Vec> cube_grid(std::size_t d, std::size_t n);

} // namespace reluforge
