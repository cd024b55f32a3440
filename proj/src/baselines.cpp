#include "futuresight/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "futuresight/serialize.hpp"

namespace futuresight {

using nlohmann::json;

namespace {

// In-place Cholesky solve of the SPD system g * x = rhs (multiple right-hand
// sides, column-major in `rhs`). Throws on a non-positive pivot.
void cholesky_solve(Mat& g, std::vector<Vec>& rhs) {
    const int n = g.rows;
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(g(i, i)));
    const double tol = 1e-12 * std::max(max_diag, 1.0);

    for (int j = 0; j < n; ++j) {
        double d = g(j, j);
        for (int k = 0; k < j; ++k) d -= g(j, k) * g(j, k);
        if (d <= tol)
            throw std::runtime_error(
                "fit_linear: singular normal equations; regularize with lambda > 0");
        g(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (int k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
            g(i, j) = s / g(j, j);
        }
    }
    for (Vec& col : rhs) {
        // forward substitution L y = b
        for (int i = 0; i < n; ++i) {
            double s = col[i];
            for (int k = 0; k < i; ++k) s -= g(i, k) * col[k];
            col[i] = s / g(i, i);
        }
        // back substitution L^T x = y
        for (int i = n - 1; i >= 0; --i) {
            double s = col[i];
            for (int k = i + 1; k < n; ++k) s -= g(k, i) * col[k];
            col[i] = s / g(i, i);
        }
    }
}

}  // namespace

LinearRegressor fit_linear(const std::vector<FramePair>& pairs, double lambda) {
    if (pairs.empty()) throw std::invalid_argument("fit_linear: need at least one pair");
    if (lambda < 0.0) throw std::invalid_argument("fit_linear: lambda must be >= 0");
    const int d_in = static_cast<int>(pairs.front().input.size());
    const int d_out = static_cast<int>(pairs.front().target.size());
    const int m = d_in + 1;  // bias-augmented

    Mat g(m, m);
    std::vector<Vec> rhs(d_out, Vec(m, 0.0));
    for (const FramePair& p : pairs) {
        if (static_cast<int>(p.input.size()) != d_in ||
            static_cast<int>(p.target.size()) != d_out)
            throw std::invalid_argument("fit_linear: inconsistent pair dimensions");
        for (int i = 0; i < m; ++i) {
            const double xi = i < d_in ? p.input[i] : 1.0;
            for (int j = 0; j <= i; ++j) {
                const double xj = j < d_in ? p.input[j] : 1.0;
                g(i, j) += xi * xj;
            }
            for (int c = 0; c < d_out; ++c) rhs[c][i] += xi * p.target[c];
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) g(i, j) = g(j, i);
    for (int i = 0; i < d_in; ++i) g(i, i) += lambda;  // bias stays unregularized

    cholesky_solve(g, rhs);

    LinearRegressor reg;
    reg.lambda = lambda;
    reg.w = Mat(d_out, d_in);
    reg.b.assign(d_out, 0.0);
    for (int c = 0; c < d_out; ++c) {
        for (int i = 0; i < d_in; ++i) reg.w(c, i) = rhs[c][i];
        reg.b[c] = rhs[c][d_in];
    }
    return reg;
}

Vec predict_linear(const LinearRegressor& reg, const Vec& x) {
    Vec y = matvec(reg.w, x);
    for (size_t i = 0; i < y.size(); ++i) y[i] += reg.b[i];
    return y;
}

NeighborBank build_neighbor_bank(const std::vector<FramePair>& pairs) {
    NeighborBank bank;
    bank.entries.reserve(pairs.size());
    for (const FramePair& p : pairs) bank.entries.emplace_back(p.input, p.target);
    return bank;
}

Vec knn_predict(const NeighborBank& bank, const Vec& query, int k) {
    if (bank.entries.empty()) throw std::invalid_argument("knn_predict: empty bank");
    if (k < 1 || k > static_cast<int>(bank.entries.size()))
        throw std::invalid_argument("knn_predict: k out of range");

    std::vector<std::pair<double, size_t>> dist;
    dist.reserve(bank.entries.size());
    for (size_t i = 0; i < bank.entries.size(); ++i)
        dist.emplace_back(squared_distance(bank.entries[i].first, query), i);
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    Vec out(bank.entries.front().second.size(), 0.0);
    for (int n = 0; n < k; ++n) {
        const Vec& fut = bank.entries[dist[n].second].second;
        for (size_t i = 0; i < out.size(); ++i) out[i] += fut[i] / static_cast<double>(k);
    }
    return out;
}

void save_linear(const LinearRegressor& reg, const std::string& path) {
    json j;
    j["format"] = kModelFormat;
    j["type"] = "linear";
    j["lambda"] = reg.lambda;
    j["w"] = {{"rows", reg.w.rows}, {"cols", reg.w.cols}, {"data", reg.w.a}};
    j["b"] = reg.b;
    save_json_file(path, j);
}

LinearRegressor load_linear(const std::string& path) {
    json j = load_json_file(path);
    check_model_tags(j, "linear", path);
    LinearRegressor reg;
    try {
        reg.lambda = j.at("lambda").get<double>();
        reg.w = Mat(j.at("w").at("rows").get<int>(), j.at("w").at("cols").get<int>());
        reg.w.a = j.at("w").at("data").get<std::vector<double>>();
        reg.b = j.at("b").get<Vec>();
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": invalid linear model: " + e.what());
    }
    if (reg.w.a.size() != static_cast<size_t>(reg.w.rows) * reg.w.cols ||
        reg.b.size() != static_cast<size_t>(reg.w.rows))
        throw std::runtime_error(path + ": linear model shape mismatch");
    return reg;
}

void save_neighbor_bank(const NeighborBank& bank, int k, const std::string& path) {
    json j;
    j["format"] = kModelFormat;
    j["type"] = "knn";
    j["k"] = k;
    json entries = json::array();
    for (const auto& [key, value] : bank.entries) entries.push_back({{"key", key}, {"future", value}});
    j["entries"] = std::move(entries);
    save_json_file(path, j);
}

std::pair<NeighborBank, int> load_neighbor_bank(const std::string& path) {
    json j = load_json_file(path);
    check_model_tags(j, "knn", path);
    NeighborBank bank;
    int k = 1;
    try {
        k = j.at("k").get<int>();
        for (const json& e : j.at("entries"))
            bank.entries.emplace_back(e.at("key").get<Vec>(), e.at("future").get<Vec>());
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": invalid knn model: " + e.what());
    }
    return {std::move(bank), k};
}

}  // namespace futuresight
