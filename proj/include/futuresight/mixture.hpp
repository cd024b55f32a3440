#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "futuresight/data.hpp"
#include "futuresight/nn.hpp"

namespace futuresight {

struct MixtureConfig {
    int k = 1;
    int shared_layer_count = 2;  // leading hidden layers tied across all networks
    double private_prob = 0.5;   // chance a unit in an interleaved layer is private
    int alternations = 10;
    int iters_per_alternation = 200;

    void validate() const;
};

// Per hidden layer, per unit: 0 = shared by all networks, j in 1..K = private
// to network j. Fixed once at model creation.
struct SharingMask {
    std::vector<std::vector<int>> tags;

    void validate(const NetworkSpec& spec, int k) const;
};

SharingMask build_sharing_masks(const NetworkSpec& spec, const MixtureConfig& config,
                                uint64_t seed);

// K logical regression networks realized in one parameter store; network j
// sees the shared units plus its own private units.
struct MixtureModel {
    NetworkSpec spec;
    MixtureConfig config;
    SharingMask masks;
    NetworkParams params;

    UnitMasks unit_masks_for(int network) const;  // network is 1-based
    std::vector<Vec> predict_all(const Vec& input) const;
};

MixtureModel make_mixture(const NetworkSpec& spec, const MixtureConfig& config, double init_scale,
                          double bias_const, uint64_t seed);

// (video_id, t) -> network index in 1..K
using AssignmentTable = std::map<SampleKey, int>;

std::vector<Vec> predict_all(const MixtureModel& model, const Vec& input);

// z = argmin_k ||g_k(x) - target||^2, ties to the lowest k.
AssignmentTable e_step(const MixtureModel& model, const std::vector<FramePair>& pairs);

// Minibatch SGD with momentum on the assigned networks. `iter_offset` keys
// the per-iteration random streams so chained calls continue one schedule;
// `state` carries momentum across calls when provided.
void m_step(MixtureModel& model, const std::vector<FramePair>& pairs,
            const AssignmentTable& assignments, const OptimizerConfig& opt, int iters,
            OptimizerState* state = nullptr, uint64_t iter_offset = 0);

// Full-dataset objective sum ||g_z(x) - target||^2, dropout off.
double mixture_objective(const MixtureModel& model, const std::vector<FramePair>& pairs,
                         const AssignmentTable& assignments);

struct TrainResult {
    MixtureModel model;
    AssignmentTable assignments;
    std::vector<double> loss_history;  // after every half-step: m, e, m, e, ...
};

struct TrainSettings {
    double init_scale = 0.01;
    double bias_const = 0.0;
};

TrainResult train_alternating(const std::vector<FramePair>& pairs, const NetworkSpec& spec,
                              const MixtureConfig& mix_config, const OptimizerConfig& opt,
                              const TrainSettings& settings = {});

// Plain single-network regression on the same iteration schedule; the K=1
// mixture must reproduce it bitwise.
struct RegressionResult {
    NetworkParams params;
    std::vector<double> loss_history;
};

RegressionResult train_regressor(const std::vector<FramePair>& pairs, const NetworkSpec& spec,
                                 const OptimizerConfig& opt, int total_iters,
                                 int record_every = 0, const TrainSettings& settings = {});

void save_model(const MixtureModel& model, const std::string& path);
MixtureModel load_model(const std::string& path);

}  // namespace futuresight
