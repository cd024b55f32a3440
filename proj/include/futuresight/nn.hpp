#pragma once

#include <cstdint>
#include <vector>

#include "futuresight/linalg.hpp"

namespace futuresight {

// Fully connected network: ReLU on hidden layers, identity output,
// optional inverted dropout on hidden activations.
struct NetworkSpec {
    std::vector<int> layer_sizes;  // input dim, hidden dims..., output dim
    double dropout_ratio = 0.0;    // in [0,1), hidden layers only

    void validate() const;
    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    int weight_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
    int hidden_layers() const { return static_cast<int>(layer_sizes.size()) - 2; }
};

struct NetworkParams {
    std::vector<Mat> weights;  // weights[l] has shape layer_sizes[l+1] x layer_sizes[l]
    std::vector<Vec> biases;

    static NetworkParams zeros_like(const NetworkSpec& spec);
    void check_shapes(const NetworkSpec& spec) const;
};

using Gradients = NetworkParams;

struct OptimizerConfig {
    double learning_rate = 0.001;
    double momentum = 0.9;
    int batch_size = 32;
    uint64_t seed = 0;

    void validate() const;
};

struct OptimizerState {
    std::vector<Mat> weight_velocity;
    std::vector<Vec> bias_velocity;

    static OptimizerState zeros_like(const NetworkParams& params);
};

enum class Mode { train, infer };

// Per hidden layer, per unit: 1 keeps the unit, 0 silences it (activation
// and gradient). Used by the mixture module to realize K logical networks
// in one parameter store.
using UnitMasks = std::vector<std::vector<uint8_t>>;

// Weights ~ N(0, init_scale^2), biases = bias_const. Deterministic in seed.
NetworkParams init_params(const NetworkSpec& spec, double init_scale, double bias_const,
                          uint64_t seed);

Vec forward(const NetworkParams& params, const NetworkSpec& spec, const Vec& input, Mode mode,
            uint64_t dropout_seed = 0, const UnitMasks* unit_masks = nullptr);

// Sum of squared differences, no 1/2 factor.
double euclidean_loss(const Vec& pred, const Vec& target);

struct BackwardResult {
    Gradients grads;
    double loss = 0.0;
};

BackwardResult backward(const NetworkParams& params, const NetworkSpec& spec, const Vec& input,
                        const Vec& target, Mode mode, uint64_t dropout_seed = 0,
                        const UnitMasks* unit_masks = nullptr);

// v <- momentum*v - lr*g; w <- w + v
void sgd_step(NetworkParams& params, const Gradients& grads, OptimizerState& state,
              const OptimizerConfig& config);

struct GradCheckResult {
    double max_rel_error = 0.0;
    int checked = 0;
    int skipped = 0;  // coordinates too close to a ReLU kink
};

// Central-difference check of backward() with dropout disabled.
GradCheckResult gradient_check(const NetworkParams& params, const NetworkSpec& spec,
                               const Vec& input, const Vec& target, double epsilon);

}  // namespace futuresight
