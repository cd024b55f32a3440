#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "futuresight/linalg.hpp"

namespace futuresight {

// Mean over samples of ||pred - target||_2 (not squared).
double mean_euclidean_distance(const std::vector<Vec>& preds, const std::vector<Vec>& targets);

// Mean over samples of min_k ||pred_k - target||_2.
double min_over_k_distance(const std::vector<std::vector<Vec>>& k_preds,
                           const std::vector<Vec>& targets);

double top1_accuracy(const std::vector<std::string>& predicted,
                     const std::vector<std::string>& truth);

// Mean of precision at the ranks of the positives, scores sorted descending,
// ties broken by original index.
double average_precision(const Vec& scores, const std::vector<int>& binary_labels);

struct MetricReport {
    double mean_euclidean_distance = 0.0;
    double mean_min_over_k_distance = 0.0;
    double top1_accuracy = -1.0;  // negative = not computed
    std::map<std::string, double> per_category_ap;
    double mean_ap = -1.0;
    int n_samples = 0;

    nlohmann::json to_json() const;
    std::string csv_header() const;
    std::string csv_row() const;
};

}  // namespace futuresight
