#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "offload/rng.hpp"

namespace offload {

// Small fully-connected Q-network: ReLU hidden layers, identity output,
// one output unit per network choice. Weights are row-major per output unit.
struct QNetwork {
    std::vector<int> layer_dims;
    std::vector<std::vector<double>> weights;  // [layer][out * in_dim + in]
    std::vector<std::vector<double>> biases;   // [layer][out]
    uint64_t train_steps = 0;

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    std::size_t parameter_count() const;
};

// Shape-congruent gradient buffers.
struct GradientSet {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    void zero();
    void scale(double f);
};

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
QNetwork init_network(const std::vector<int>& layer_dims, Rng& rng);

GradientSet zero_gradients(const QNetwork& net);

std::vector<double> forward(const QNetwork& net, std::span<const double> input);

// Squared-error loss (z - Q(s,a))^2 for the selected output unit; exact
// analytic gradients are accumulated into `grads` (callers batching samples
// zero and rescale themselves). Returns the loss.
double backward(const QNetwork& net, std::span<const double> input, int action_index,
                double target, GradientSet& grads);

// Plain gradient descent, theta <- theta - alpha * grad, alpha in (0,1).
void sgd_step(QNetwork& net, const GradientSet& grads, double alpha);

QNetwork clone_parameters(const QNetwork& net);

// Key-value checkpoint with flattened row-major tensors; decimal-exact
// round-trip (doubles rendered shortest-round-trip).
std::string checkpoint_to_string(const QNetwork& net);
QNetwork checkpoint_from_string(const std::string& text);
void save_checkpoint(const QNetwork& net, const std::string& path);
QNetwork load_checkpoint(const std::string& path);

}  // namespace offload
