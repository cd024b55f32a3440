#pragma once

#include <string>
#include <utility>
#include <vector>

#include "futuresight/data.hpp"
#include "futuresight/linalg.hpp"

namespace futuresight {

inline Vec identity_predict(const Vec& x) { return x; }

struct LinearRegressor {
    Mat w;  // d_out x d_in
    Vec b;
    double lambda = 0.0;
};

// Ridge regression solved in closed form via the normal equations on the
// bias-augmented design; the bias column is not regularized.
LinearRegressor fit_linear(const std::vector<FramePair>& pairs, double lambda);

Vec predict_linear(const LinearRegressor& reg, const Vec& x);

struct NeighborBank {
    std::vector<std::pair<Vec, Vec>> entries;  // (observed frame, its future)
};

NeighborBank build_neighbor_bank(const std::vector<FramePair>& pairs);

// Mean of the futures of the k nearest keys; ties by insertion order.
Vec knn_predict(const NeighborBank& bank, const Vec& query, int k);

void save_linear(const LinearRegressor& reg, const std::string& path);
LinearRegressor load_linear(const std::string& path);
void save_neighbor_bank(const NeighborBank& bank, int k, const std::string& path);
std::pair<NeighborBank, int> load_neighbor_bank(const std::string& path);

}  // namespace futuresight
