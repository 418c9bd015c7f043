#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iforge/linalg.hpp"

namespace iforge {

struct Mask;  // see mask.hpp

// Architecture of a feedforward ReLU regression network.
struct NetworkSpec {
    int input_dim = 0;
    std::vector<int> hidden_widths;
    int output_dim = 1;

    int hidden_layer_count() const { return static_cast<int>(hidden_widths.size()); }
    int total_hidden() const;
    // Widths of every layer: input, hidden..., output.
    std::vector<int> layer_widths() const;
    void validate() const;  // throws std::invalid_argument
};

// All weight matrices and bias vectors of one network.
// weights[l] maps layer l to layer l+1; shape (width_{l+1} x width_l).
struct Parameters {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    static Parameters zeros(const NetworkSpec& spec);
    std::size_t count() const;
    bool all_finite() const;
    bool same_shape(const Parameters& other) const;
    bool operator==(const Parameters& other) const = default;
};

std::size_t parameter_count(const NetworkSpec& spec);

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
Parameters init_network(const NetworkSpec& spec, std::uint64_t seed);

// Activations cached by a forward pass, enough to run backward.
struct ForwardTrace {
    double prediction = 0.0;
    std::vector<std::vector<double>> pre;   // per hidden layer, pre-activation
    std::vector<std::vector<double>> post;  // per hidden layer, after ReLU/mask
};

// Masked units emit 0; per-step and test-stochastic masks scale retained
// units by 1/p (inverted dropout), fixed structural masks do not.
// Throws std::runtime_error("numerical overflow") on non-finite intermediates.
ForwardTrace forward(const NetworkSpec& spec, const Parameters& params,
                     std::span<const double> x, const Mask* mask = nullptr);

// Deterministic maskless prediction.
double predict(const NetworkSpec& spec, const Parameters& params, std::span<const double> x);

// Exact gradient of the mean squared error over the batch. Masked units
// contribute zero gradient; the ReLU subgradient at 0 is taken as 0.
Parameters backward(const NetworkSpec& spec, const Parameters& params, const Matrix& X,
                    std::span<const double> y, const Mask* mask = nullptr);

struct OptimizerState {
    Parameters first_moment;
    Parameters second_moment;
    long step = 0;
    double learning_rate = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;

    static OptimizerState init(const NetworkSpec& spec, double learning_rate);
    void validate_shapes(const Parameters& params) const;
};

// Standard Adam update with bias correction. Throws on a non-finite result.
void adam_step(Parameters& params, const Parameters& grads, OptimizerState& state);

enum class MaskMode { none, per_step_dropout, fixed };

struct TrainConfig {
    int epochs = 1;
    int batch_size = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    bool shuffle = true;
};

// Mini-batch Adam over `epochs` passes with per-epoch shuffling under
// config.seed. per_step_dropout resamples an inverted-scaling mask each
// batch; fixed keeps the supplied structural mask with no scaling.
Parameters train(const NetworkSpec& spec, const Matrix& X, std::span<const double> y,
                 const TrainConfig& config, MaskMode mode = MaskMode::none,
                 const Mask* fixed_mask = nullptr, double dropout_p = 1.0);

// Per-example parameter gradient d f(x; w) / d w, flattened layer-major:
// for each layer, W entries row-major, then the bias vector.
std::vector<double> jacobian(const NetworkSpec& spec, const Parameters& params,
                             std::span<const double> x);

// True when the fitted network emits one constant over the whole training
// sample: every path to the output is dead, so no gradient can ever revive
// it. A small ReLU network can fall into this under an unlucky
// initialization.
bool is_collapsed(const NetworkSpec& spec, const Parameters& params, const Matrix& X,
                  const Mask* mask = nullptr);

// train(), retried under derived initialization seeds while the outcome is a
// collapsed constant network. Deterministic given config.seed; at most
// max_restarts redraws, returning the last attempt if all of them collapse.
Parameters train_with_restarts(const NetworkSpec& spec, const Matrix& X,
                               std::span<const double> y, const TrainConfig& config,
                               MaskMode mode = MaskMode::none, const Mask* fixed_mask = nullptr,
                               double dropout_p = 1.0, int max_restarts = 5);

}  // namespace iforge
