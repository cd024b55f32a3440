#include "futuresight/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "futuresight/serialize.hpp"

namespace futuresight {

using nlohmann::json;

namespace {
// Sub-stream tags of the master training seed.
constexpr uint64_t kStreamInit = 10;
constexpr uint64_t kStreamMasks = 11;
constexpr uint64_t kStreamAssign = 12;
constexpr uint64_t kStreamIter = 13;
}  // namespace

void MixtureConfig::validate() const {
    if (k < 1) throw std::invalid_argument("MixtureConfig: k must be >= 1");
    if (shared_layer_count < 1)
        throw std::invalid_argument("MixtureConfig: shared_layer_count must be >= 1");
    if (private_prob < 0.0 || private_prob > 1.0)
        throw std::invalid_argument("MixtureConfig: private_prob must be in [0,1]");
    if (alternations < 1) throw std::invalid_argument("MixtureConfig: alternations must be >= 1");
    if (iters_per_alternation < 0)
        throw std::invalid_argument("MixtureConfig: iters_per_alternation must be >= 0");
}

void SharingMask::validate(const NetworkSpec& spec, int k) const {
    if (static_cast<int>(tags.size()) != spec.hidden_layers())
        throw std::invalid_argument("SharingMask: expected " +
                                    std::to_string(spec.hidden_layers()) + " hidden layers, got " +
                                    std::to_string(tags.size()));
    for (size_t l = 0; l < tags.size(); ++l) {
        if (static_cast<int>(tags[l].size()) != spec.layer_sizes[l + 1])
            throw std::invalid_argument("SharingMask: layer " + std::to_string(l) +
                                        " has wrong unit count");
        for (int tag : tags[l])
            if (tag < 0 || tag > k)
                throw std::invalid_argument("SharingMask: layer " + std::to_string(l) +
                                            " references network " + std::to_string(tag) +
                                            " but k=" + std::to_string(k));
    }
}

SharingMask build_sharing_masks(const NetworkSpec& spec, const MixtureConfig& config,
                                uint64_t seed) {
    spec.validate();
    config.validate();
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution go_private(config.private_prob);
    std::uniform_int_distribution<int> pick_network(1, config.k);

    SharingMask masks;
    for (int l = 0; l < spec.hidden_layers(); ++l) {
        std::vector<int> layer(spec.layer_sizes[l + 1], 0);
        if (l >= config.shared_layer_count) {
            for (int& tag : layer)
                if (go_private(rng)) tag = pick_network(rng);
        }
        masks.tags.push_back(std::move(layer));
    }
    return masks;
}

UnitMasks MixtureModel::unit_masks_for(int network) const {
    if (network < 1 || network > config.k)
        throw std::invalid_argument("unit_masks_for: network index out of range");
    UnitMasks masks;
    for (const auto& layer : this->masks.tags) {
        std::vector<uint8_t> m(layer.size());
        for (size_t i = 0; i < layer.size(); ++i)
            m[i] = (layer[i] == 0 || layer[i] == network) ? 1 : 0;
        masks.push_back(std::move(m));
    }
    return masks;
}

std::vector<Vec> MixtureModel::predict_all(const Vec& input) const {
    std::vector<Vec> outputs;
    outputs.reserve(config.k);
    for (int k = 1; k <= config.k; ++k) {
        UnitMasks masks = unit_masks_for(k);
        outputs.push_back(forward(params, spec, input, Mode::infer, 0, &masks));
    }
    return outputs;
}

std::vector<Vec> predict_all(const MixtureModel& model, const Vec& input) {
    return model.predict_all(input);
}

MixtureModel make_mixture(const NetworkSpec& spec, const MixtureConfig& config, double init_scale,
                          double bias_const, uint64_t seed) {
    MixtureModel model;
    model.spec = spec;
    model.config = config;
    model.params = init_params(spec, init_scale, bias_const, derive_seed(seed, kStreamInit));
    model.masks = build_sharing_masks(spec, config, derive_seed(seed, kStreamMasks));
    return model;
}

AssignmentTable e_step(const MixtureModel& model, const std::vector<FramePair>& pairs) {
    std::vector<UnitMasks> masks;
    for (int k = 1; k <= model.config.k; ++k) masks.push_back(model.unit_masks_for(k));

    AssignmentTable table;
    for (const FramePair& p : pairs) {
        int best = 1;
        double best_loss = 0.0;
        for (int k = 1; k <= model.config.k; ++k) {
            Vec pred = forward(model.params, model.spec, p.input, Mode::infer, 0, &masks[k - 1]);
            double loss = euclidean_loss(pred, p.target);
            if (k == 1 || loss < best_loss) {
                best = k;
                best_loss = loss;
            }
        }
        table[sample_key(p)] = best;
    }
    return table;
}

void m_step(MixtureModel& model, const std::vector<FramePair>& pairs,
            const AssignmentTable& assignments, const OptimizerConfig& opt, int iters,
            OptimizerState* state, uint64_t iter_offset) {
    opt.validate();
    if (iters < 0) throw std::invalid_argument("m_step: iters must be >= 0");
    std::vector<int> network_of(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto it = assignments.find(sample_key(pairs[i]));
        if (it == assignments.end())
            throw std::invalid_argument("m_step: unassigned sample (" + pairs[i].video_id + ", " +
                                        std::to_string(pairs[i].t) + ")");
        if (it->second < 1 || it->second > model.config.k)
            throw std::invalid_argument("m_step: assignment out of range");
        network_of[i] = it->second;
    }
    if (pairs.empty() || iters == 0) return;

    std::vector<UnitMasks> masks;
    for (int k = 1; k <= model.config.k; ++k) masks.push_back(model.unit_masks_for(k));

    OptimizerState local = OptimizerState::zeros_like(model.params);
    OptimizerState& vel = state ? *state : local;
    Gradients acc = NetworkParams::zeros_like(model.spec);

    for (int it = 0; it < iters; ++it) {
        std::mt19937_64 rng(derive_seed(opt.seed, kStreamIter, iter_offset + it));
        std::uniform_int_distribution<size_t> pick(0, pairs.size() - 1);
        std::vector<size_t> batch(opt.batch_size);
        for (size_t& b : batch) b = pick(rng);
        std::vector<uint64_t> dropout_seeds(batch.size());
        for (uint64_t& s : dropout_seeds) s = rng();

        for (Mat& g : acc.weights) std::fill(g.a.begin(), g.a.end(), 0.0);
        for (Vec& g : acc.biases) std::fill(g.begin(), g.end(), 0.0);

        for (size_t bi = 0; bi < batch.size(); ++bi) {
            const FramePair& p = pairs[batch[bi]];
            BackwardResult r = backward(model.params, model.spec, p.input, p.target, Mode::train,
                                        dropout_seeds[bi], &masks[network_of[batch[bi]] - 1]);
            for (size_t l = 0; l < acc.weights.size(); ++l) {
                for (size_t i = 0; i < acc.weights[l].a.size(); ++i)
                    acc.weights[l].a[i] += r.grads.weights[l].a[i];
                for (size_t i = 0; i < acc.biases[l].size(); ++i)
                    acc.biases[l][i] += r.grads.biases[l][i];
            }
        }
        const double inv = 1.0 / static_cast<double>(batch.size());
        for (Mat& g : acc.weights)
            for (double& v : g.a) v *= inv;
        for (Vec& g : acc.biases)
            for (double& v : g) v *= inv;
        sgd_step(model.params, acc, vel, opt);
    }
}

double mixture_objective(const MixtureModel& model, const std::vector<FramePair>& pairs,
                         const AssignmentTable& assignments) {
    std::vector<UnitMasks> masks;
    for (int k = 1; k <= model.config.k; ++k) masks.push_back(model.unit_masks_for(k));
    double total = 0.0;
    for (const FramePair& p : pairs) {
        auto it = assignments.find(sample_key(p));
        if (it == assignments.end())
            throw std::invalid_argument("mixture_objective: unassigned sample");
        Vec pred =
            forward(model.params, model.spec, p.input, Mode::infer, 0, &masks[it->second - 1]);
        total += euclidean_loss(pred, p.target);
    }
    return total;
}

namespace {

// Networks left without samples receive the ceil(1% N) worst-fitting pairs.
void rescue_empty_components(const MixtureModel& model, const std::vector<FramePair>& pairs,
                             AssignmentTable& assignments) {
    if (model.config.k < 2) return;
    std::vector<int> count(model.config.k + 1, 0);
    for (const FramePair& p : pairs) ++count[assignments.at(sample_key(p))];

    std::vector<int> empty;
    for (int k = 1; k <= model.config.k; ++k)
        if (count[k] == 0) empty.push_back(k);
    if (empty.empty()) return;

    std::vector<UnitMasks> masks;
    for (int k = 1; k <= model.config.k; ++k) masks.push_back(model.unit_masks_for(k));
    std::vector<std::pair<double, size_t>> by_loss;
    by_loss.reserve(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
        int z = assignments.at(sample_key(pairs[i]));
        Vec pred =
            forward(model.params, model.spec, pairs[i].input, Mode::infer, 0, &masks[z - 1]);
        by_loss.emplace_back(euclidean_loss(pred, pairs[i].target), i);
    }
    std::sort(by_loss.begin(), by_loss.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    const size_t grab = static_cast<size_t>(
        std::ceil(0.01 * static_cast<double>(pairs.size())));
    size_t cursor = 0;
    for (int k : empty) {
        for (size_t n = 0; n < grab && cursor < by_loss.size(); ++n, ++cursor)
            assignments[sample_key(pairs[by_loss[cursor].second])] = k;
    }
}

}  // namespace

TrainResult train_alternating(const std::vector<FramePair>& pairs, const NetworkSpec& spec,
                              const MixtureConfig& mix_config, const OptimizerConfig& opt,
                              const TrainSettings& settings) {
    if (pairs.empty()) throw std::invalid_argument("train_alternating: empty dataset");
    mix_config.validate();

    TrainResult result;
    result.model =
        make_mixture(spec, mix_config, settings.init_scale, settings.bias_const, opt.seed);

    std::mt19937_64 zrng(derive_seed(opt.seed, kStreamAssign));
    std::uniform_int_distribution<int> pick(1, mix_config.k);
    for (const FramePair& p : pairs) result.assignments[sample_key(p)] = pick(zrng);

    OptimizerState state = OptimizerState::zeros_like(result.model.params);
    uint64_t global_iter = 0;
    for (int round = 0; round < mix_config.alternations; ++round) {
        m_step(result.model, pairs, result.assignments, opt, mix_config.iters_per_alternation,
               &state, global_iter);
        global_iter += static_cast<uint64_t>(mix_config.iters_per_alternation);
        result.loss_history.push_back(mixture_objective(result.model, pairs, result.assignments));

        result.assignments = e_step(result.model, pairs);
        result.loss_history.push_back(mixture_objective(result.model, pairs, result.assignments));
        rescue_empty_components(result.model, pairs, result.assignments);
    }
    return result;
}

RegressionResult train_regressor(const std::vector<FramePair>& pairs, const NetworkSpec& spec,
                                 const OptimizerConfig& opt, int total_iters, int record_every,
                                 const TrainSettings& settings) {
    if (pairs.empty()) throw std::invalid_argument("train_regressor: empty dataset");
    opt.validate();
    spec.validate();

    RegressionResult result;
    result.params = init_params(spec, settings.init_scale, settings.bias_const,
                                derive_seed(opt.seed, kStreamInit));
    OptimizerState state = OptimizerState::zeros_like(result.params);
    Gradients acc = NetworkParams::zeros_like(spec);

    auto full_loss = [&]() {
        double total = 0.0;
        for (const FramePair& p : pairs)
            total += euclidean_loss(forward(result.params, spec, p.input, Mode::infer), p.target);
        return total;
    };

    for (int it = 0; it < total_iters; ++it) {
        std::mt19937_64 rng(derive_seed(opt.seed, kStreamIter, static_cast<uint64_t>(it)));
        std::uniform_int_distribution<size_t> pick(0, pairs.size() - 1);
        std::vector<size_t> batch(opt.batch_size);
        for (size_t& b : batch) b = pick(rng);
        std::vector<uint64_t> dropout_seeds(batch.size());
        for (uint64_t& s : dropout_seeds) s = rng();

        for (Mat& g : acc.weights) std::fill(g.a.begin(), g.a.end(), 0.0);
        for (Vec& g : acc.biases) std::fill(g.begin(), g.end(), 0.0);
        for (size_t bi = 0; bi < batch.size(); ++bi) {
            const FramePair& p = pairs[batch[bi]];
            BackwardResult r = backward(result.params, spec, p.input, p.target, Mode::train,
                                        dropout_seeds[bi], nullptr);
            for (size_t l = 0; l < acc.weights.size(); ++l) {
                for (size_t i = 0; i < acc.weights[l].a.size(); ++i)
                    acc.weights[l].a[i] += r.grads.weights[l].a[i];
                for (size_t i = 0; i < acc.biases[l].size(); ++i)
                    acc.biases[l][i] += r.grads.biases[l][i];
            }
        }
        const double inv = 1.0 / static_cast<double>(batch.size());
        for (Mat& g : acc.weights)
            for (double& v : g.a) v *= inv;
        for (Vec& g : acc.biases)
            for (double& v : g) v *= inv;
        sgd_step(result.params, acc, state, opt);

        if (record_every > 0 && (it + 1) % record_every == 0)
            result.loss_history.push_back(full_loss());
    }
    return result;
}

void save_model(const MixtureModel& model, const std::string& path) {
    json j;
    j["format"] = kModelFormat;
    j["type"] = "mixture";
    j["spec"] = {{"layer_sizes", model.spec.layer_sizes},
                 {"dropout_ratio", model.spec.dropout_ratio}};
    j["config"] = {{"k", model.config.k},
                   {"shared_layer_count", model.config.shared_layer_count},
                   {"private_prob", model.config.private_prob},
                   {"alternations", model.config.alternations},
                   {"iters_per_alternation", model.config.iters_per_alternation}};
    j["masks"] = model.masks.tags;
    json weights = json::array();
    for (const Mat& w : model.params.weights)
        weights.push_back({{"rows", w.rows}, {"cols", w.cols}, {"data", w.a}});
    j["weights"] = std::move(weights);
    j["biases"] = model.params.biases;
    save_json_file(path, j);
}

MixtureModel load_model(const std::string& path) {
    json j = load_json_file(path);
    check_model_tags(j, "mixture", path);

    MixtureModel model;
    try {
        model.spec.layer_sizes = j.at("spec").at("layer_sizes").get<std::vector<int>>();
        model.spec.dropout_ratio = j.at("spec").at("dropout_ratio").get<double>();
        const json& c = j.at("config");
        model.config.k = c.at("k").get<int>();
        model.config.shared_layer_count = c.at("shared_layer_count").get<int>();
        model.config.private_prob = c.at("private_prob").get<double>();
        model.config.alternations = c.at("alternations").get<int>();
        model.config.iters_per_alternation = c.at("iters_per_alternation").get<int>();
        model.masks.tags = j.at("masks").get<std::vector<std::vector<int>>>();
        for (const json& w : j.at("weights")) {
            Mat m(w.at("rows").get<int>(), w.at("cols").get<int>());
            m.a = w.at("data").get<std::vector<double>>();
            if (m.a.size() != static_cast<size_t>(m.rows) * m.cols)
                throw std::runtime_error("weight matrix data size mismatch");
            model.params.weights.push_back(std::move(m));
        }
        model.params.biases = j.at("biases").get<std::vector<Vec>>();
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": invalid mixture model: " + e.what());
    }

    model.spec.validate();
    model.config.validate();
    model.params.check_shapes(model.spec);
    model.masks.validate(model.spec, model.config.k);
    for (const Mat& w : model.params.weights)
        for (double v : w.a)
            if (!std::isfinite(v)) throw std::runtime_error(path + ": non-finite weight");
    return model;
}

}  // namespace futuresight
