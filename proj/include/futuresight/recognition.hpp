#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "futuresight/linalg.hpp"
#include "futuresight/mixture.hpp"

namespace futuresight {

enum class ClassifierLoss { hinge, logistic };

struct ClassifierConfig {
    ClassifierLoss loss = ClassifierLoss::hinge;
    double l2 = 1e-4;
    int iters = 2000;
    int batch_size = 64;
    uint64_t seed = 0;
    bool multi_label = false;  // per-category independent positives (AP protocol)

    void validate() const;
};

// One-vs-rest linear scorer over a fixed category list.
struct LinearClassifier {
    std::vector<std::string> categories;
    Mat w;  // categories x feature dim
    Vec b;
    ClassifierConfig config;

    int category_index(const std::string& name) const;  // -1 when absent
};

LinearClassifier train_linear_classifier(const std::vector<Vec>& features,
                                         const std::vector<std::vector<std::string>>& labels,
                                         const ClassifierConfig& config);

struct ClassifyResult {
    Vec scores;        // raw per-category scores
    Vec distribution;  // softmax over scores
};

ClassifyResult classify(const LinearClassifier& clf, const Vec& feature);

// Weighted average of per-network category distributions; weights default
// uniform.
Vec marginalize_predictions(const std::vector<Vec>& distributions, const Vec& weights = {});

struct AnticipationResult {
    std::vector<Vec> per_network_scores;
    std::vector<Vec> per_network_distributions;
    Vec marginal;

    int argmax_category() const;
};

AnticipationResult anticipate_category(const MixtureModel& model, const LinearClassifier& clf,
                                       const Vec& input);

void save_classifier(const LinearClassifier& clf, const std::string& path);
LinearClassifier load_classifier(const std::string& path);

}  // namespace futuresight
