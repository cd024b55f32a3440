#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace futuresight {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

inline Vec matvec(const Mat& m, const Vec& x) {
    if (static_cast<int>(x.size()) != m.cols)
        throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        const double* row = &m.a[static_cast<size_t>(i) * m.cols];
        for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("squared_distance: length mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(const Vec& a, const Vec& b) {
    return std::sqrt(squared_distance(a, b));
}

// splitmix64; used to derive independent seeds from one master seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for sub-stream `stream`, element `index`, of master seed `seed`.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream, uint64_t index = 0) {
    return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ index);
}

}  // namespace futuresight
