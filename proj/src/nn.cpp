#include "futuresight/nn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace futuresight {

void NetworkSpec::validate() const {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("NetworkSpec: need at least input and output sizes");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("NetworkSpec: layer sizes must be >= 1");
    if (dropout_ratio < 0.0 || dropout_ratio >= 1.0)
        throw std::invalid_argument("NetworkSpec: dropout_ratio must be in [0,1)");
}

void OptimizerConfig::validate() const {
    if (learning_rate < 0.0) throw std::invalid_argument("OptimizerConfig: learning_rate < 0");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("OptimizerConfig: momentum must be in [0,1)");
    if (batch_size < 1) throw std::invalid_argument("OptimizerConfig: batch_size < 1");
}

NetworkParams NetworkParams::zeros_like(const NetworkSpec& spec) {
    NetworkParams p;
    for (int l = 0; l < spec.weight_layers(); ++l) {
        p.weights.emplace_back(spec.layer_sizes[l + 1], spec.layer_sizes[l]);
        p.biases.emplace_back(spec.layer_sizes[l + 1], 0.0);
    }
    return p;
}

void NetworkParams::check_shapes(const NetworkSpec& spec) const {
    if (static_cast<int>(weights.size()) != spec.weight_layers() ||
        static_cast<int>(biases.size()) != spec.weight_layers())
        throw std::invalid_argument("NetworkParams: layer count mismatch");
    for (int l = 0; l < spec.weight_layers(); ++l) {
        if (weights[l].rows != spec.layer_sizes[l + 1] || weights[l].cols != spec.layer_sizes[l] ||
            static_cast<int>(biases[l].size()) != spec.layer_sizes[l + 1])
            throw std::invalid_argument("NetworkParams: shape mismatch at layer " +
                                        std::to_string(l));
    }
}

OptimizerState OptimizerState::zeros_like(const NetworkParams& params) {
    OptimizerState s;
    for (const Mat& w : params.weights) s.weight_velocity.emplace_back(w.rows, w.cols);
    for (const Vec& b : params.biases) s.bias_velocity.emplace_back(b.size(), 0.0);
    return s;
}

NetworkParams init_params(const NetworkSpec& spec, double init_scale, double bias_const,
                          uint64_t seed) {
    spec.validate();
    if (init_scale < 0.0) throw std::invalid_argument("init_params: init_scale < 0");
    NetworkParams p = NetworkParams::zeros_like(spec);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int l = 0; l < spec.weight_layers(); ++l) {
        for (double& w : p.weights[l].a) w = init_scale * gauss(rng);
        for (double& b : p.biases[l]) b = bias_const;
    }
    return p;
}

namespace {

struct LayerTrace {
    Vec pre;   // pre-activation z
    Vec act;   // gated activation fed to the next layer
    Vec gate;  // combined unit-mask / dropout multiplier (hidden layers)
};

// Runs the network, optionally recording per-layer state for backward().
Vec run_forward(const NetworkParams& params, const NetworkSpec& spec, const Vec& input, Mode mode,
                uint64_t dropout_seed, const UnitMasks* unit_masks,
                std::vector<LayerTrace>* trace) {
    if (static_cast<int>(input.size()) != spec.input_dim())
        throw std::invalid_argument("forward: input has length " + std::to_string(input.size()) +
                                    ", expected " + std::to_string(spec.input_dim()));
    params.check_shapes(spec);
    if (unit_masks && static_cast<int>(unit_masks->size()) != spec.hidden_layers())
        throw std::invalid_argument("forward: unit mask layer count mismatch");

    const bool use_dropout = mode == Mode::train && spec.dropout_ratio > 0.0;
    std::mt19937_64 rng(dropout_seed);
    std::bernoulli_distribution keep(1.0 - spec.dropout_ratio);
    const double rescale = use_dropout ? 1.0 / (1.0 - spec.dropout_ratio) : 1.0;

    Vec h = input;
    for (int l = 0; l < spec.weight_layers(); ++l) {
        Vec z = matvec(params.weights[l], h);
        for (size_t i = 0; i < z.size(); ++i) z[i] += params.biases[l][i];
        const bool is_hidden = l < spec.weight_layers() - 1;
        Vec gate;
        if (is_hidden) {
            gate.assign(z.size(), 1.0);
            if (unit_masks) {
                const auto& m = (*unit_masks)[l];
                if (m.size() != z.size())
                    throw std::invalid_argument("forward: unit mask size mismatch at layer " +
                                                std::to_string(l));
                for (size_t i = 0; i < z.size(); ++i)
                    if (!m[i]) gate[i] = 0.0;
            }
            if (use_dropout) {
                for (size_t i = 0; i < z.size(); ++i) gate[i] *= keep(rng) ? rescale : 0.0;
            }
            Vec act(z.size());
            for (size_t i = 0; i < z.size(); ++i) act[i] = gate[i] * (z[i] > 0.0 ? z[i] : 0.0);
            if (trace) trace->push_back({z, act, gate});
            h = std::move(act);
        } else {
            if (trace) trace->push_back({z, z, {}});
            h = std::move(z);
        }
    }
    return h;
}

}  // namespace

Vec forward(const NetworkParams& params, const NetworkSpec& spec, const Vec& input, Mode mode,
            uint64_t dropout_seed, const UnitMasks* unit_masks) {
    return run_forward(params, spec, input, mode, dropout_seed, unit_masks, nullptr);
}

double euclidean_loss(const Vec& pred, const Vec& target) {
    return squared_distance(pred, target);
}

BackwardResult backward(const NetworkParams& params, const NetworkSpec& spec, const Vec& input,
                        const Vec& target, Mode mode, uint64_t dropout_seed,
                        const UnitMasks* unit_masks) {
    if (target.size() != static_cast<size_t>(spec.output_dim()))
        throw std::invalid_argument("backward: target dimension mismatch");
    std::vector<LayerTrace> trace;
    Vec out = run_forward(params, spec, input, mode, dropout_seed, unit_masks, &trace);

    BackwardResult res;
    res.loss = euclidean_loss(out, target);
    res.grads = NetworkParams::zeros_like(spec);

    // d(loss)/d(out) for loss = sum (out - target)^2
    Vec delta(out.size());
    for (size_t i = 0; i < out.size(); ++i) delta[i] = 2.0 * (out[i] - target[i]);

    for (int l = spec.weight_layers() - 1; l >= 0; --l) {
        const Vec& below = l == 0 ? input : trace[l - 1].act;
        Mat& gw = res.grads.weights[l];
        for (int i = 0; i < gw.rows; ++i) {
            for (int j = 0; j < gw.cols; ++j) gw(i, j) = delta[i] * below[j];
            res.grads.biases[l][i] = delta[i];
        }
        if (l > 0) {
            const Mat& w = params.weights[l];
            Vec next(w.cols, 0.0);
            for (int i = 0; i < w.rows; ++i)
                for (int j = 0; j < w.cols; ++j) next[j] += w(i, j) * delta[i];
            const LayerTrace& lt = trace[l - 1];
            for (int j = 0; j < w.cols; ++j)
                next[j] *= lt.gate[j] * (lt.pre[j] > 0.0 ? 1.0 : 0.0);
            delta = std::move(next);
        }
    }
    return res;
}

void sgd_step(NetworkParams& params, const Gradients& grads, OptimizerState& state,
              const OptimizerConfig& config) {
    config.validate();
    if (grads.weights.size() != params.weights.size())
        throw std::invalid_argument("sgd_step: gradient/param layer count mismatch");
    for (size_t l = 0; l < params.weights.size(); ++l) {
        if (!params.weights[l].same_shape(grads.weights[l]) ||
            params.biases[l].size() != grads.biases[l].size())
            throw std::invalid_argument("sgd_step: shape mismatch at layer " + std::to_string(l));
        Mat& v = state.weight_velocity[l];
        for (size_t i = 0; i < v.a.size(); ++i) {
            v.a[i] = config.momentum * v.a[i] - config.learning_rate * grads.weights[l].a[i];
            params.weights[l].a[i] += v.a[i];
        }
        Vec& vb = state.bias_velocity[l];
        for (size_t i = 0; i < vb.size(); ++i) {
            vb[i] = config.momentum * vb[i] - config.learning_rate * grads.biases[l][i];
            params.biases[l][i] += vb[i];
        }
    }
}

namespace {

// Forward pass recording hidden pre-activations only, for kink detection.
double loss_and_preacts(const NetworkParams& params, const NetworkSpec& spec, const Vec& input,
                        const Vec& target, std::vector<Vec>* preacts) {
    std::vector<LayerTrace> trace;
    Vec out = run_forward(params, spec, input, Mode::infer, 0, nullptr, &trace);
    if (preacts) {
        preacts->clear();
        for (int l = 0; l < spec.hidden_layers(); ++l) preacts->push_back(trace[l].pre);
    }
    return euclidean_loss(out, target);
}

bool kink_proximal(const std::vector<Vec>& plus, const std::vector<Vec>& minus, double epsilon) {
    for (size_t l = 0; l < plus.size(); ++l) {
        for (size_t i = 0; i < plus[l].size(); ++i) {
            if ((plus[l][i] > 0.0) != (minus[l][i] > 0.0)) return true;
            if (std::fabs(plus[l][i]) < epsilon || std::fabs(minus[l][i]) < epsilon) return true;
        }
    }
    return false;
}

}  // namespace

GradCheckResult gradient_check(const NetworkParams& params, const NetworkSpec& spec,
                               const Vec& input, const Vec& target, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("gradient_check: epsilon must be positive");
    BackwardResult analytic = backward(params, spec, input, target, Mode::infer);

    GradCheckResult result;
    NetworkParams probe = params;
    std::vector<Vec> pre_plus, pre_minus;

    auto check_coord = [&](double& coord, double analytic_grad) {
        const double saved = coord;
        coord = saved + epsilon;
        double lp = loss_and_preacts(probe, spec, input, target, &pre_plus);
        coord = saved - epsilon;
        double lm = loss_and_preacts(probe, spec, input, target, &pre_minus);
        coord = saved;
        if (kink_proximal(pre_plus, pre_minus, epsilon)) {
            ++result.skipped;
            return;
        }
        const double numeric = (lp - lm) / (2.0 * epsilon);
        const double denom = std::max({std::fabs(analytic_grad), std::fabs(numeric), 1e-8});
        result.max_rel_error =
            std::max(result.max_rel_error, std::fabs(analytic_grad - numeric) / denom);
        ++result.checked;
    };

    for (size_t l = 0; l < probe.weights.size(); ++l) {
        for (size_t i = 0; i < probe.weights[l].a.size(); ++i)
            check_coord(probe.weights[l].a[i], analytic.grads.weights[l].a[i]);
        for (size_t i = 0; i < probe.biases[l].size(); ++i)
            check_coord(probe.biases[l][i], analytic.grads.biases[l][i]);
    }
    return result;
}

}  // namespace futuresight
