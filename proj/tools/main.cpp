// futuresight command line: synthesize feature sequences, train the mixture
// regressor and baselines, predict future representations, evaluate.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "futuresight/baselines.hpp"
#include "futuresight/data.hpp"
#include "futuresight/metrics.hpp"
#include "futuresight/mixture.hpp"
#include "futuresight/nn.hpp"
#include "futuresight/recognition.hpp"
#include "futuresight/serialize.hpp"

using namespace futuresight;
using nlohmann::json;

namespace {

// flags > config file > defaults: after parsing, any option the user did not
// pass on the command line may be overridden from the JSON config file.
template <typename T>
void config_override(const CLI::App& cmd, const json& cfg, const std::string& flag, T& var) {
    std::string key = flag;
    for (char& c : key)
        if (c == '-') c = '_';
    if (cmd.count("--" + flag) == 0 && cfg.contains(key)) var = cfg.at(key).get<T>();
}

json load_config_file(const CLI::App& cmd, const std::string& path) {
    if (cmd.count("--config") == 0 || path.empty()) return json::object();
    json cfg = load_json_file(path);
    if (!cfg.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    return cfg;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

struct Prediction {
    std::vector<Vec> preds;
};

struct PredictionFile {
    json header;
    std::map<SampleKey, Prediction> by_key;
};

PredictionFile load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open predictions file: " + path);
    PredictionFile pf;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("predictions file " + path + " line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
        if (j.contains("header")) {
            pf.header = j["header"];
            continue;
        }
        SampleKey key{j.at("video").get<std::string>(), j.at("t").get<int64_t>()};
        Prediction p;
        p.preds = j.at("preds").get<std::vector<Vec>>();
        if (!pf.by_key.emplace(key, std::move(p)).second)
            throw std::runtime_error("predictions file " + path + " line " +
                                     std::to_string(line_no) + ": duplicate sample id");
    }
    return pf;
}

// ---------------------------------------------------------------- synth ----

int cmd_synth(const json& cfg_file, const CLI::App& cmd, SynthConfig cfg, std::string mode_probs,
              std::string out, std::string truth_out) {
    config_override(cmd, cfg_file, "modes", cfg.n_modes);
    config_override(cmd, cfg_file, "dim", cfg.dim);
    config_override(cmd, cfg_file, "sequences", cfg.n_sequences);
    config_override(cmd, cfg_file, "len", cfg.seq_len);
    config_override(cmd, cfg_file, "noise", cfg.noise_sigma);
    config_override(cmd, cfg_file, "seed", cfg.seed);
    config_override(cmd, cfg_file, "mode-probs", mode_probs);
    if (!mode_probs.empty()) cfg.mode_probs = parse_double_list(mode_probs);
    if (truth_out.empty()) truth_out = out + ".truth.json";

    cfg.validate();
    auto [seqs, truth] = generate_synthetic(cfg);
    save_sequences(out, seqs);

    json resolved = {{"command", "synth"},       {"modes", cfg.n_modes},
                     {"dim", cfg.dim},           {"sequences", cfg.n_sequences},
                     {"len", cfg.seq_len},       {"noise", cfg.noise_sigma},
                     {"mode_probs", cfg.mode_probs}, {"seed", cfg.seed},
                     {"out", out},               {"truth_out", truth_out}};

    json jt;
    jt["format"] = kModelFormat;
    jt["type"] = "synth-truth";
    jt["config"] = resolved;
    json modes = json::array();
    for (const AffineMode& m : truth.modes)
        modes.push_back({{"a", {{"rows", m.a.rows}, {"cols", m.a.cols}, {"data", m.a.a}}},
                         {"b", m.b}});
    jt["modes"] = std::move(modes);
    json transitions = json::array();
    for (const auto& [key, mode] : truth.transition_mode)
        transitions.push_back({{"video", key.first}, {"t", key.second}, {"mode", mode}});
    jt["transitions"] = std::move(transitions);
    save_json_file(truth_out, jt);
    return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainFlags {
    std::string data;
    int delta = 1;
    std::string hidden = "32,32";
    double dropout = 0.5;
    int k = 1;
    double private_prob = 0.5;
    int shared_layers = 2;
    int alternations = 10;
    int iters = 200;
    double lr = 0.001;
    double momentum = 0.9;
    int batch = 32;
    double init_scale = 0.01;
    double bias_const = 0.0;
    uint64_t seed = 0;
    std::string out;
    std::string history;
};

int cmd_train(const json& cfg_file, const CLI::App& cmd, TrainFlags f) {
    config_override(cmd, cfg_file, "data", f.data);
    config_override(cmd, cfg_file, "delta", f.delta);
    config_override(cmd, cfg_file, "hidden", f.hidden);
    config_override(cmd, cfg_file, "dropout", f.dropout);
    config_override(cmd, cfg_file, "k", f.k);
    config_override(cmd, cfg_file, "private-prob", f.private_prob);
    config_override(cmd, cfg_file, "shared-layers", f.shared_layers);
    config_override(cmd, cfg_file, "alternations", f.alternations);
    config_override(cmd, cfg_file, "iters", f.iters);
    config_override(cmd, cfg_file, "lr", f.lr);
    config_override(cmd, cfg_file, "momentum", f.momentum);
    config_override(cmd, cfg_file, "batch", f.batch);
    config_override(cmd, cfg_file, "init-scale", f.init_scale);
    config_override(cmd, cfg_file, "bias-const", f.bias_const);
    config_override(cmd, cfg_file, "seed", f.seed);
    if (f.history.empty()) f.history = f.out + ".history.csv";

    std::vector<FeatureSequence> seqs = load_sequences(f.data);
    std::vector<FramePair> pairs = make_pairs(seqs, f.delta);
    if (pairs.empty()) throw std::invalid_argument("train: no training pairs in " + f.data);

    NetworkSpec spec;
    spec.layer_sizes.push_back(static_cast<int>(pairs.front().input.size()));
    for (int h : parse_int_list(f.hidden)) spec.layer_sizes.push_back(h);
    spec.layer_sizes.push_back(static_cast<int>(pairs.front().target.size()));
    spec.dropout_ratio = f.dropout;

    MixtureConfig mix;
    mix.k = f.k;
    mix.private_prob = f.private_prob;
    mix.shared_layer_count = f.shared_layers;
    mix.alternations = f.alternations;
    mix.iters_per_alternation = f.iters;

    OptimizerConfig opt;
    opt.learning_rate = f.lr;
    opt.momentum = f.momentum;
    opt.batch_size = f.batch;
    opt.seed = f.seed;

    TrainSettings settings{f.init_scale, f.bias_const};
    TrainResult result = train_alternating(pairs, spec, mix, opt, settings);

    for (double v : result.loss_history)
        if (!std::isfinite(v))
            throw std::runtime_error("train: objective became non-finite; lower the learning "
                                     "rate or the init scale");

    json resolved = {{"command", "train"},
                     {"data", f.data},
                     {"delta", f.delta},
                     {"hidden", f.hidden},
                     {"dropout", f.dropout},
                     {"k", f.k},
                     {"private_prob", f.private_prob},
                     {"shared_layers", f.shared_layers},
                     {"alternations", f.alternations},
                     {"iters", f.iters},
                     {"lr", f.lr},
                     {"momentum", f.momentum},
                     {"batch", f.batch},
                     {"init_scale", f.init_scale},
                     {"bias_const", f.bias_const},
                     {"seed", f.seed},
                     {"out", f.out}};

    save_model(result.model, f.out);
    {
        // append provenance to the saved container
        json j = load_json_file(f.out);
        j["provenance"] = resolved;
        save_json_file(f.out, j);
    }

    std::ofstream hist(f.history);
    if (!hist) throw std::runtime_error("cannot write history file: " + f.history);
    hist << "# config: " << resolved.dump() << "\n";
    hist << "alternation,phase,objective\n";
    hist.precision(17);
    for (size_t i = 0; i < result.loss_history.size(); ++i)
        hist << i / 2 << ',' << (i % 2 == 0 ? 'm' : 'e') << ',' << result.loss_history[i] << "\n";
    return 0;
}

// ------------------------------------------------------------- baselines ----

int cmd_train_linear(const json& cfg_file, const CLI::App& cmd, std::string data, int delta,
                     double lambda, std::string out) {
    config_override(cmd, cfg_file, "data", data);
    config_override(cmd, cfg_file, "delta", delta);
    config_override(cmd, cfg_file, "lambda", lambda);
    std::vector<FramePair> pairs = make_pairs(load_sequences(data), delta);
    if (pairs.empty()) throw std::invalid_argument("train-linear: no pairs in " + data);
    LinearRegressor reg = fit_linear(pairs, lambda);
    save_linear(reg, out);
    json j = load_json_file(out);
    j["provenance"] = {{"command", "train-linear"}, {"data", data}, {"delta", delta},
                       {"lambda", lambda},          {"out", out}};
    save_json_file(out, j);
    return 0;
}

int cmd_train_knn(const json& cfg_file, const CLI::App& cmd, std::string data, int delta,
                  int neighbors, std::string out) {
    config_override(cmd, cfg_file, "data", data);
    config_override(cmd, cfg_file, "delta", delta);
    config_override(cmd, cfg_file, "neighbors", neighbors);
    std::vector<FramePair> pairs = make_pairs(load_sequences(data), delta);
    if (pairs.empty()) throw std::invalid_argument("train-knn: no pairs in " + data);
    if (neighbors < 1 || neighbors > static_cast<int>(pairs.size()))
        throw std::invalid_argument("train-knn: --neighbors out of range");
    save_neighbor_bank(build_neighbor_bank(pairs), neighbors, out);
    json j = load_json_file(out);
    j["provenance"] = {{"command", "train-knn"}, {"data", data}, {"delta", delta},
                       {"neighbors", neighbors}, {"out", out}};
    save_json_file(out, j);
    return 0;
}

// -------------------------------------------------------- train-classifier ----

struct ClassifierFlags {
    std::string data;
    int delta = 1;
    std::string source = "future";  // current | future | predicted
    std::string predictions;
    std::string label_mode = "single";
    std::string loss = "hinge";
    double l2 = 1e-4;
    int iters = 2000;
    int batch = 64;
    uint64_t seed = 0;
    std::string out;
};

int cmd_train_classifier(const json& cfg_file, const CLI::App& cmd, ClassifierFlags f) {
    config_override(cmd, cfg_file, "data", f.data);
    config_override(cmd, cfg_file, "delta", f.delta);
    config_override(cmd, cfg_file, "source", f.source);
    config_override(cmd, cfg_file, "predictions", f.predictions);
    config_override(cmd, cfg_file, "label-mode", f.label_mode);
    config_override(cmd, cfg_file, "loss", f.loss);
    config_override(cmd, cfg_file, "l2", f.l2);
    config_override(cmd, cfg_file, "iters", f.iters);
    config_override(cmd, cfg_file, "batch", f.batch);
    config_override(cmd, cfg_file, "seed", f.seed);
    if (f.source != "current" && f.source != "future" && f.source != "predicted")
        throw std::invalid_argument("train-classifier: --source must be current|future|predicted");
    if (f.source == "predicted" && f.predictions.empty())
        throw std::invalid_argument("train-classifier: --source predicted needs --predictions");

    std::vector<FramePair> pairs = make_pairs(load_sequences(f.data), f.delta);
    std::optional<PredictionFile> preds;
    if (f.source == "predicted") preds = load_predictions(f.predictions);

    std::vector<Vec> features;
    std::vector<std::vector<std::string>> labels;
    for (const FramePair& p : pairs) {
        if (p.future_labels.empty()) continue;
        if (f.source == "current") {
            features.push_back(p.input);
        } else if (f.source == "future") {
            features.push_back(p.target);
        } else {
            auto it = preds->by_key.find(sample_key(p));
            if (it == preds->by_key.end())
                throw std::runtime_error("train-classifier: no prediction for sample (" +
                                         p.video_id + ", " + std::to_string(p.t) + ")");
            // adapted strategy: learn on the prediction that matched the
            // actual future best
            const std::vector<Vec>& kp = it->second.preds;
            size_t best = 0;
            double best_d = squared_distance(kp[0], p.target);
            for (size_t k = 1; k < kp.size(); ++k) {
                double d = squared_distance(kp[k], p.target);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            features.push_back(kp[best]);
        }
        labels.push_back(p.future_labels);
    }
    if (features.empty())
        throw std::invalid_argument("train-classifier: no labeled samples in " + f.data);

    ClassifierConfig cc;
    cc.loss = f.loss == "logistic" ? ClassifierLoss::logistic : ClassifierLoss::hinge;
    cc.l2 = f.l2;
    cc.iters = f.iters;
    cc.batch_size = f.batch;
    cc.seed = f.seed;
    cc.multi_label = f.label_mode == "multi";
    LinearClassifier clf = train_linear_classifier(features, labels, cc);
    save_classifier(clf, f.out);
    json j = load_json_file(f.out);
    j["provenance"] = {{"command", "train-classifier"}, {"data", f.data},
                       {"delta", f.delta},              {"source", f.source},
                       {"predictions", f.predictions},  {"label_mode", f.label_mode},
                       {"loss", f.loss},                {"l2", f.l2},
                       {"iters", f.iters},              {"batch", f.batch},
                       {"seed", f.seed},                {"out", f.out}};
    save_json_file(f.out, j);
    return 0;
}

// --------------------------------------------------------------- predict ----

int cmd_predict(const json& cfg_file, const CLI::App& cmd, std::string model_path,
                bool identity, std::string data, int delta, std::string out) {
    config_override(cmd, cfg_file, "model", model_path);
    config_override(cmd, cfg_file, "data", data);
    config_override(cmd, cfg_file, "delta", delta);
    if (identity == (model_path != ""))
        throw std::invalid_argument("predict: pass exactly one of --model and --identity");

    std::vector<FramePair> pairs = make_pairs(load_sequences(data), delta);

    std::string model_type = "identity";
    std::optional<MixtureModel> mixture;
    std::optional<LinearRegressor> linear;
    std::optional<std::pair<NeighborBank, int>> knn;
    if (!identity) {
        json j = load_json_file(model_path);
        model_type = j.value("type", "");
        if (model_type == "mixture")
            mixture = load_model(model_path);
        else if (model_type == "linear")
            linear = load_linear(model_path);
        else if (model_type == "knn")
            knn = load_neighbor_bank(model_path);
        else
            throw std::runtime_error(model_path + ": unknown model type '" + model_type + "'");
    }

    auto predict_one = [&](const Vec& x) -> std::vector<Vec> {
        if (mixture) {
            if (static_cast<int>(x.size()) != mixture->spec.input_dim())
                throw std::runtime_error("predict: data dim " + std::to_string(x.size()) +
                                         " does not match model input dim " +
                                         std::to_string(mixture->spec.input_dim()));
            return mixture->predict_all(x);
        }
        if (linear) {
            if (static_cast<int>(x.size()) != linear->w.cols)
                throw std::runtime_error("predict: data dim " + std::to_string(x.size()) +
                                         " does not match model input dim " +
                                         std::to_string(linear->w.cols));
            return {predict_linear(*linear, x)};
        }
        if (knn) {
            if (x.size() != knn->first.entries.front().first.size())
                throw std::runtime_error(
                    "predict: data dim " + std::to_string(x.size()) +
                    " does not match bank dim " +
                    std::to_string(knn->first.entries.front().first.size()));
            return {knn_predict(knn->first, x, knn->second)};
        }
        return {identity_predict(x)};
    };

    std::ofstream o(out);
    if (!o) throw std::runtime_error("cannot write predictions file: " + out);
    json header = {{"header",
                    {{"command", "predict"},
                     {"model", identity ? std::string("identity") : model_path},
                     {"model_type", model_type},
                     {"data", data},
                     {"delta", delta},
                     {"k", mixture ? mixture->config.k : 1}}}};
    o << header.dump() << "\n";
    for (const FramePair& p : pairs) {
        json j = {{"video", p.video_id}, {"t", p.t}, {"preds", predict_one(p.input)}};
        o << j.dump() << "\n";
    }
    if (!o) throw std::runtime_error("write failed: " + out);
    return 0;
}

// ------------------------------------------------------------------ eval ----

int cmd_eval(const json& cfg_file, const CLI::App& cmd, std::string predictions, std::string data,
             int delta, std::string classifier, std::string label_mode, std::string out,
             std::string csv) {
    config_override(cmd, cfg_file, "predictions", predictions);
    config_override(cmd, cfg_file, "data", data);
    config_override(cmd, cfg_file, "delta", delta);
    config_override(cmd, cfg_file, "classifier", classifier);
    config_override(cmd, cfg_file, "label-mode", label_mode);

    PredictionFile pf = load_predictions(predictions);
    if (delta <= 0) delta = pf.header.value("delta", 1);
    std::vector<FramePair> pairs = make_pairs(load_sequences(data), delta);
    if (pairs.size() != pf.by_key.size())
        throw std::runtime_error("eval: predictions hold " + std::to_string(pf.by_key.size()) +
                                 " samples but data yields " + std::to_string(pairs.size()) +
                                 " pairs at delta " + std::to_string(delta));

    std::vector<std::vector<Vec>> k_preds;
    std::vector<Vec> flat_preds, flat_targets, targets;
    for (const FramePair& p : pairs) {
        auto it = pf.by_key.find(sample_key(p));
        if (it == pf.by_key.end())
            throw std::runtime_error("eval: no prediction for sample (" + p.video_id + ", " +
                                     std::to_string(p.t) + ")");
        k_preds.push_back(it->second.preds);
        targets.push_back(p.target);
        for (const Vec& pred : it->second.preds) {
            flat_preds.push_back(pred);
            flat_targets.push_back(p.target);
        }
    }

    MetricReport report;
    report.n_samples = static_cast<int>(pairs.size());
    report.mean_euclidean_distance = mean_euclidean_distance(flat_preds, flat_targets);
    report.mean_min_over_k_distance = min_over_k_distance(k_preds, targets);

    if (!classifier.empty()) {
        LinearClassifier clf = load_classifier(classifier);
        if (label_mode == "single") {
            std::vector<std::string> predicted, truth;
            for (size_t i = 0; i < pairs.size(); ++i) {
                if (pairs[i].future_labels.empty()) continue;
                std::vector<Vec> dists;
                for (const Vec& pred : k_preds[i]) dists.push_back(classify(clf, pred).distribution);
                Vec marginal = marginalize_predictions(dists);
                int arg = static_cast<int>(
                    std::max_element(marginal.begin(), marginal.end()) - marginal.begin());
                predicted.push_back(clf.categories[arg]);
                truth.push_back(pairs[i].future_labels.front());
            }
            if (!predicted.empty()) report.top1_accuracy = top1_accuracy(predicted, truth);
        } else {
            std::map<std::string, Vec> scores;
            std::map<std::string, std::vector<int>> binaries;
            for (size_t i = 0; i < pairs.size(); ++i) {
                std::vector<Vec> dists;
                for (const Vec& pred : k_preds[i]) dists.push_back(classify(clf, pred).distribution);
                Vec marginal = marginalize_predictions(dists);
                for (size_t c = 0; c < clf.categories.size(); ++c) {
                    const std::string& cat = clf.categories[c];
                    scores[cat].push_back(marginal[c]);
                    const auto& labs = pairs[i].future_labels;
                    binaries[cat].push_back(
                        std::find(labs.begin(), labs.end(), cat) != labs.end() ? 1 : 0);
                }
            }
            double sum = 0.0;
            for (const std::string& cat : clf.categories) {
                double ap = average_precision(scores[cat], binaries[cat]);
                report.per_category_ap[cat] = ap;
                sum += ap;
            }
            report.mean_ap = sum / static_cast<double>(clf.categories.size());
        }
    }

    json j;
    j["format"] = "futuresight-report-v1";
    j["config"] = {{"command", "eval"},        {"predictions", predictions},
                   {"data", data},             {"delta", delta},
                   {"classifier", classifier}, {"label_mode", label_mode},
                   {"out", out}};
    j["metrics"] = report.to_json();
    save_json_file(out, j, 2);

    if (!csv.empty()) {
        std::ofstream c(csv);
        if (!c) throw std::runtime_error("cannot write csv: " + csv);
        c << report.csv_header() << "\n" << report.csv_row() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"future representation forecasting: mixture-of-regressors pipeline"};
    app.require_subcommand(1);

    std::string config_path;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic multi-modal dataset");
    SynthConfig scfg;
    std::string s_probs, s_out, s_truth;
    synth->add_option("--config", config_path, "JSON config file");
    synth->add_option("--modes", scfg.n_modes, "number of affine modes")->check(CLI::PositiveNumber);
    synth->add_option("--dim", scfg.dim, "feature dimension");
    synth->add_option("--sequences", scfg.n_sequences, "number of videos");
    synth->add_option("--len", scfg.seq_len, "frames per video");
    synth->add_option("--noise", scfg.noise_sigma, "transition noise sigma");
    synth->add_option("--mode-probs", s_probs, "comma separated mode probabilities");
    synth->add_option("--seed", scfg.seed, "random seed");
    synth->add_option("--out", s_out, "output feature file (JSON lines)")->required();
    synth->add_option("--truth-out", s_truth, "ground truth output (default <out>.truth.json)");

    // train
    auto* train = app.add_subcommand("train", "train the mixture regressor");
    TrainFlags tf;
    train->add_option("--config", config_path, "JSON config file");
    train->add_option("--data", tf.data, "feature file")->required();
    train->add_option("--delta", tf.delta, "anticipation horizon in frames");
    train->add_option("--hidden", tf.hidden, "comma separated hidden layer sizes");
    train->add_option("--dropout", tf.dropout, "dropout ratio on hidden layers");
    train->add_option("--k", tf.k, "number of mixture networks");
    train->add_option("--private-prob", tf.private_prob, "per-unit private probability p");
    train->add_option("--shared-layers", tf.shared_layers, "leading hidden layers tied across networks");
    train->add_option("--alternations", tf.alternations, "assignment/backprop rounds");
    train->add_option("--iters", tf.iters, "SGD iterations per alternation");
    train->add_option("--lr", tf.lr, "learning rate");
    train->add_option("--momentum", tf.momentum, "momentum term");
    train->add_option("--batch", tf.batch, "minibatch size");
    train->add_option("--init-scale", tf.init_scale, "weight init stddev");
    train->add_option("--bias-const", tf.bias_const, "bias init constant");
    train->add_option("--seed", tf.seed, "random seed");
    train->add_option("--out", tf.out, "output model file")->required();
    train->add_option("--history", tf.history, "objective CSV (default <out>.history.csv)");

    // train-linear
    auto* tlin = app.add_subcommand("train-linear", "fit the ridge regression baseline");
    std::string tl_data, tl_out;
    int tl_delta = 1;
    double tl_lambda = 1e-3;
    tlin->add_option("--config", config_path, "JSON config file");
    tlin->add_option("--data", tl_data, "feature file")->required();
    tlin->add_option("--delta", tl_delta, "anticipation horizon in frames");
    tlin->add_option("--lambda", tl_lambda, "ridge strength");
    tlin->add_option("--out", tl_out, "output model file")->required();

    // train-knn
    auto* tknn = app.add_subcommand("train-knn", "store the nearest neighbor bank");
    std::string tk_data, tk_out;
    int tk_delta = 1, tk_neighbors = 1;
    tknn->add_option("--config", config_path, "JSON config file");
    tknn->add_option("--data", tk_data, "feature file")->required();
    tknn->add_option("--delta", tk_delta, "anticipation horizon in frames");
    tknn->add_option("--neighbors", tk_neighbors, "number of neighbors to average");
    tknn->add_option("--out", tk_out, "output model file")->required();

    // train-classifier
    auto* tclf = app.add_subcommand("train-classifier", "train a linear category classifier");
    ClassifierFlags cf;
    tclf->add_option("--config", config_path, "JSON config file");
    tclf->add_option("--data", cf.data, "feature file with labels")->required();
    tclf->add_option("--delta", cf.delta, "anticipation horizon in frames");
    tclf->add_option("--source", cf.source, "feature source: current|future|predicted");
    tclf->add_option("--predictions", cf.predictions, "predictions file (for --source predicted)");
    tclf->add_option("--label-mode", cf.label_mode, "single|multi");
    tclf->add_option("--loss", cf.loss, "hinge|logistic");
    tclf->add_option("--l2", cf.l2, "L2 regularization");
    tclf->add_option("--iters", cf.iters, "subgradient iterations");
    tclf->add_option("--batch", cf.batch, "minibatch size");
    tclf->add_option("--seed", cf.seed, "random seed");
    tclf->add_option("--out", cf.out, "output classifier file")->required();

    // predict
    auto* predict = app.add_subcommand("predict", "predict future representations");
    std::string p_model, p_data, p_out;
    bool p_identity = false;
    int p_delta = 1;
    predict->add_option("--config", config_path, "JSON config file");
    predict->add_option("--model", p_model, "trained model file");
    predict->add_flag("--identity", p_identity, "use the identity predictor");
    predict->add_option("--data", p_data, "feature file")->required();
    predict->add_option("--delta", p_delta, "anticipation horizon in frames");
    predict->add_option("--out", p_out, "output predictions file")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against the actual future");
    std::string e_preds, e_data, e_clf, e_label_mode = "single", e_out, e_csv;
    int e_delta = 0;
    eval->add_option("--config", config_path, "JSON config file");
    eval->add_option("--predictions", e_preds, "predictions file")->required();
    eval->add_option("--data", e_data, "feature file")->required();
    eval->add_option("--delta", e_delta, "anticipation horizon (default: predictions header)");
    eval->add_option("--classifier", e_clf, "classifier file for category metrics");
    eval->add_option("--label-mode", e_label_mode, "single (accuracy) | multi (per-category AP)");
    eval->add_option("--out", e_out, "report JSON")->required();
    eval->add_option("--csv", e_csv, "also emit a CSV metrics row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
    }

    try {
        if (*synth)
            return cmd_synth(load_config_file(*synth, config_path), *synth, scfg, s_probs, s_out,
                             s_truth);
        if (*train) return cmd_train(load_config_file(*train, config_path), *train, tf);
        if (*tlin)
            return cmd_train_linear(load_config_file(*tlin, config_path), *tlin, tl_data, tl_delta,
                                    tl_lambda, tl_out);
        if (*tknn)
            return cmd_train_knn(load_config_file(*tknn, config_path), *tknn, tk_data, tk_delta,
                                 tk_neighbors, tk_out);
        if (*tclf) return cmd_train_classifier(load_config_file(*tclf, config_path), *tclf, cf);
        if (*predict)
            return cmd_predict(load_config_file(*predict, config_path), *predict, p_model,
                               p_identity, p_data, p_delta, p_out);
        if (*eval)
            return cmd_eval(load_config_file(*eval, config_path), *eval, e_preds, e_data, e_delta,
                            e_clf, e_label_mode, e_out, e_csv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
