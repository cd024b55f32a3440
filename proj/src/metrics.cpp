#include "futuresight/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace futuresight {

double mean_euclidean_distance(const std::vector<Vec>& preds, const std::vector<Vec>& targets) {
    if (preds.empty()) throw std::invalid_argument("mean_euclidean_distance: empty input");
    if (preds.size() != targets.size())
        throw std::invalid_argument("mean_euclidean_distance: count mismatch");
    double total = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) total += euclidean_distance(preds[i], targets[i]);
    return total / static_cast<double>(preds.size());
}

double min_over_k_distance(const std::vector<std::vector<Vec>>& k_preds,
                           const std::vector<Vec>& targets) {
    if (k_preds.empty()) throw std::invalid_argument("min_over_k_distance: empty input");
    if (k_preds.size() != targets.size())
        throw std::invalid_argument("min_over_k_distance: count mismatch");
    double total = 0.0;
    for (size_t i = 0; i < k_preds.size(); ++i) {
        if (k_preds[i].empty())
            throw std::invalid_argument("min_over_k_distance: sample with no predictions");
        double best = euclidean_distance(k_preds[i][0], targets[i]);
        for (size_t k = 1; k < k_preds[i].size(); ++k)
            best = std::min(best, euclidean_distance(k_preds[i][k], targets[i]));
        total += best;
    }
    return total / static_cast<double>(k_preds.size());
}

double top1_accuracy(const std::vector<std::string>& predicted,
                     const std::vector<std::string>& truth) {
    if (predicted.empty()) throw std::invalid_argument("top1_accuracy: empty input");
    if (predicted.size() != truth.size())
        throw std::invalid_argument("top1_accuracy: count mismatch");
    size_t correct = 0;
    for (size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double average_precision(const Vec& scores, const std::vector<int>& binary_labels) {
    if (scores.size() != binary_labels.size())
        throw std::invalid_argument("average_precision: count mismatch");
    int positives = 0;
    for (int l : binary_labels) positives += l ? 1 : 0;
    if (positives == 0)
        throw std::invalid_argument("average_precision: need at least one positive label");

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    int hits = 0;
    for (size_t rank = 0; rank < order.size(); ++rank) {
        if (binary_labels[order[rank]]) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(rank + 1);
        }
    }
    return ap / static_cast<double>(positives);
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json j;
    j["mean_euclidean_distance"] = mean_euclidean_distance;
    j["mean_min_over_k_distance"] = mean_min_over_k_distance;
    j["n_samples"] = n_samples;
    if (top1_accuracy >= 0.0) j["top1_accuracy"] = top1_accuracy;
    if (!per_category_ap.empty()) {
        j["per_category_ap"] = per_category_ap;
        j["mean_ap"] = mean_ap;
    }
    return j;
}

std::string MetricReport::csv_header() const {
    std::ostringstream s;
    s << "n_samples,mean_euclidean_distance,mean_min_over_k_distance,top1_accuracy,mean_ap";
    for (const auto& [cat, ap] : per_category_ap) s << ",ap_" << cat;
    return s.str();
}

std::string MetricReport::csv_row() const {
    std::ostringstream s;
    s.precision(17);
    s << n_samples << ',' << mean_euclidean_distance << ',' << mean_min_over_k_distance << ',';
    if (top1_accuracy >= 0.0) s << top1_accuracy;
    s << ',';
    if (mean_ap >= 0.0) s << mean_ap;
    for (const auto& [cat, ap] : per_category_ap) s << ',' << ap;
    return s.str();
}

}  // namespace futuresight
