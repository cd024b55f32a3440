#include "futuresight/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "futuresight/serialize.hpp"

namespace futuresight {

using nlohmann::json;

void ClassifierConfig::validate() const {
    if (l2 < 0.0) throw std::invalid_argument("ClassifierConfig: l2 must be >= 0");
    if (iters < 1 || batch_size < 1)
        throw std::invalid_argument("ClassifierConfig: iters and batch_size must be >= 1");
}

int LinearClassifier::category_index(const std::string& name) const {
    for (size_t i = 0; i < categories.size(); ++i)
        if (categories[i] == name) return static_cast<int>(i);
    return -1;
}

LinearClassifier train_linear_classifier(const std::vector<Vec>& features,
                                         const std::vector<std::vector<std::string>>& labels,
                                         const ClassifierConfig& config) {
    config.validate();
    if (features.empty() || features.size() != labels.size())
        throw std::invalid_argument("train_linear_classifier: features/labels size mismatch");
    const size_t dim = features.front().size();
    for (const Vec& f : features)
        if (f.size() != dim)
            throw std::invalid_argument("train_linear_classifier: inconsistent feature dims");

    std::set<std::string> cats;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (!config.multi_label && labels[i].size() != 1)
            throw std::invalid_argument(
                "train_linear_classifier: single-label mode needs exactly one label per sample");
        for (const std::string& lab : labels[i]) cats.insert(lab);
    }
    if (!config.multi_label && cats.size() < 2)
        throw std::invalid_argument(
            "train_linear_classifier: need at least 2 distinct labels in single-label mode");
    if (cats.empty())
        throw std::invalid_argument("train_linear_classifier: no labels present");

    LinearClassifier clf;
    clf.config = config;
    clf.categories.assign(cats.begin(), cats.end());
    const int n_cat = static_cast<int>(clf.categories.size());
    clf.w = Mat(n_cat, static_cast<int>(dim));
    clf.b.assign(n_cat, 0.0);

    // +1/-1 targets per category
    std::vector<std::vector<int8_t>> y(n_cat, std::vector<int8_t>(features.size(), -1));
    for (size_t i = 0; i < labels.size(); ++i)
        for (const std::string& lab : labels[i]) y[clf.category_index(lab)][i] = 1;

    // Pegasos-style schedule: eta_t = 1 / (l2 * (t + t0)). The weight decay
    // factor 1 - eta*l2 stays in [0,1) for any l2.
    const double t0 = 10.0;
    const double lam = std::max(config.l2, 1e-12);
    for (int t = 1; t <= config.iters; ++t) {
        std::mt19937_64 rng(derive_seed(config.seed, 20, static_cast<uint64_t>(t)));
        std::uniform_int_distribution<size_t> pick(0, features.size() - 1);
        std::vector<size_t> batch(config.batch_size);
        for (size_t& b : batch) b = pick(rng);

        const double eta = 1.0 / (lam * (static_cast<double>(t) + t0));
        const double decay = 1.0 - eta * config.l2;
        const double scale = eta / static_cast<double>(batch.size());
        for (int c = 0; c < n_cat; ++c) {
            Vec push(dim, 0.0);
            double push_b = 0.0;
            for (size_t idx : batch) {
                const Vec& x = features[idx];
                double s = clf.b[c];
                for (size_t d = 0; d < dim; ++d) s += clf.w(c, static_cast<int>(d)) * x[d];
                const double ys = y[c][idx] * s;
                double g = 0.0;  // coefficient on y*x in the ascent direction
                if (config.loss == ClassifierLoss::hinge) {
                    if (ys < 1.0) g = 1.0;
                } else {
                    g = 1.0 / (1.0 + std::exp(ys));
                }
                if (g != 0.0) {
                    for (size_t d = 0; d < dim; ++d) push[d] += g * y[c][idx] * x[d];
                    push_b += g * y[c][idx];
                }
            }
            for (size_t d = 0; d < dim; ++d)
                clf.w(c, static_cast<int>(d)) =
                    decay * clf.w(c, static_cast<int>(d)) + scale * push[d];
            clf.b[c] += scale * push_b;  // bias unregularized
        }
    }
    return clf;
}

ClassifyResult classify(const LinearClassifier& clf, const Vec& feature) {
    if (static_cast<int>(feature.size()) != clf.w.cols)
        throw std::invalid_argument("classify: feature dim mismatch");
    ClassifyResult res;
    res.scores = matvec(clf.w, feature);
    for (size_t i = 0; i < res.scores.size(); ++i) res.scores[i] += clf.b[i];

    const double m = *std::max_element(res.scores.begin(), res.scores.end());
    res.distribution.resize(res.scores.size());
    double z = 0.0;
    for (size_t i = 0; i < res.scores.size(); ++i) {
        res.distribution[i] = std::exp(res.scores[i] - m);
        z += res.distribution[i];
    }
    for (double& p : res.distribution) p /= z;
    return res;
}

Vec marginalize_predictions(const std::vector<Vec>& distributions, const Vec& weights) {
    if (distributions.empty())
        throw std::invalid_argument("marginalize_predictions: no distributions");
    const size_t n = distributions.front().size();
    for (const Vec& d : distributions) {
        if (d.size() != n)
            throw std::invalid_argument("marginalize_predictions: distribution size mismatch");
        double sum = 0.0;
        for (double p : d) {
            if (p < 0.0)
                throw std::invalid_argument("marginalize_predictions: negative probability");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("marginalize_predictions: distribution not normalized");
    }
    Vec w = weights;
    if (w.empty()) w.assign(distributions.size(), 1.0 / static_cast<double>(distributions.size()));
    if (w.size() != distributions.size())
        throw std::invalid_argument("marginalize_predictions: weight count mismatch");
    double wsum = 0.0;
    for (double v : w) {
        if (v < 0.0) throw std::invalid_argument("marginalize_predictions: negative weight");
        wsum += v;
    }
    if (std::fabs(wsum - 1.0) > 1e-6)
        throw std::invalid_argument("marginalize_predictions: weights must sum to 1");

    Vec out(n, 0.0);
    for (size_t k = 0; k < distributions.size(); ++k)
        for (size_t i = 0; i < n; ++i) out[i] += w[k] * distributions[k][i];
    return out;
}

int AnticipationResult::argmax_category() const {
    return static_cast<int>(
        std::max_element(marginal.begin(), marginal.end()) - marginal.begin());
}

AnticipationResult anticipate_category(const MixtureModel& model, const LinearClassifier& clf,
                                       const Vec& input) {
    if (model.spec.output_dim() != clf.w.cols)
        throw std::invalid_argument("anticipate_category: model output dim " +
                                    std::to_string(model.spec.output_dim()) +
                                    " != classifier feature dim " + std::to_string(clf.w.cols));
    AnticipationResult res;
    for (const Vec& pred : model.predict_all(input)) {
        ClassifyResult c = classify(clf, pred);
        res.per_network_scores.push_back(std::move(c.scores));
        res.per_network_distributions.push_back(std::move(c.distribution));
    }
    res.marginal = marginalize_predictions(res.per_network_distributions);
    return res;
}

void save_classifier(const LinearClassifier& clf, const std::string& path) {
    json j;
    j["format"] = kModelFormat;
    j["type"] = "linear-classifier-v1";
    j["categories"] = clf.categories;
    j["loss"] = clf.config.loss == ClassifierLoss::hinge ? "hinge" : "logistic";
    j["l2"] = clf.config.l2;
    j["multi_label"] = clf.config.multi_label;
    j["w"] = {{"rows", clf.w.rows}, {"cols", clf.w.cols}, {"data", clf.w.a}};
    j["b"] = clf.b;
    save_json_file(path, j);
}

LinearClassifier load_classifier(const std::string& path) {
    json j = load_json_file(path);
    check_model_tags(j, "linear-classifier-v1", path);
    LinearClassifier clf;
    try {
        clf.categories = j.at("categories").get<std::vector<std::string>>();
        clf.config.loss =
            j.at("loss").get<std::string>() == "hinge" ? ClassifierLoss::hinge
                                                       : ClassifierLoss::logistic;
        clf.config.l2 = j.at("l2").get<double>();
        clf.config.multi_label = j.at("multi_label").get<bool>();
        clf.w = Mat(j.at("w").at("rows").get<int>(), j.at("w").at("cols").get<int>());
        clf.w.a = j.at("w").at("data").get<std::vector<double>>();
        clf.b = j.at("b").get<Vec>();
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": invalid classifier: " + e.what());
    }
    if (clf.w.a.size() != static_cast<size_t>(clf.w.rows) * clf.w.cols ||
        clf.b.size() != clf.categories.size() ||
        clf.categories.size() != static_cast<size_t>(clf.w.rows))
        throw std::runtime_error(path + ": classifier shape mismatch");
    return clf;
}

}  // namespace futuresight
