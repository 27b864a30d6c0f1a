#ifndef CROPML_TESTS_ORACLES_HPP
#define CROPML_TESTS_ORACLES_HPP

// Independent reference implementations used to check the library. These
// deliberately take the slow, obvious route (normal equations, exhaustive
// split enumeration, sort-everything nearest neighbors) and share no code
// with the paths they verify.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cropml/matrix.hpp"

namespace cropml::test::oracle {

// Gaussian elimination with partial pivoting for the square system M x = b.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> M,
                                       std::vector<double> b) {
    const std::size_t n = M.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(M[i][k]) > std::abs(M[pivot][k])) pivot = i;
        std::swap(M[k], M[pivot]);
        std::swap(b[k], b[pivot]);
        if (M[k][k] == 0.0) throw std::runtime_error("singular system");
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = M[i][k] / M[k][k];
            for (std::size_t j = k; j < n; ++j) M[i][j] -= f * M[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= M[ii][j] * x[j];
        x[ii] = s / M[ii][ii];
    }
    return x;
}

// OLS weights on [1 | X] through the normal equations (X^T X) w = X^T y.
inline std::vector<double> normal_equation_weights(const Matrix& X,
                                                   const std::vector<double>& y) {
    const std::size_t n = X.rows();
    const std::size_t m = X.cols() + 1;
    auto design = [&](std::size_t r, std::size_t c) {
        return c == 0 ? 1.0 : X(r, c - 1);
    };
    std::vector<std::vector<double>> xtx(m, std::vector<double>(m, 0.0));
    std::vector<double> xty(m, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t a = 0; a < m; ++a) {
            xty[a] += design(r, a) * y[r];
            for (std::size_t b = 0; b < m; ++b)
                xtx[a][b] += design(r, a) * design(r, b);
        }
    }
    return solve_dense(std::move(xtx), std::move(xty));
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

// Exhaustive best split: every feature, every midpoint between consecutive
// distinct sorted values; SSE computed by the two-pass mean formula.
inline SplitChoice exhaustive_best_split(const Matrix& X,
                                         const std::vector<double>& y,
                                         int min_samples_leaf = 1) {
    auto sse_of = [](const std::vector<double>& values) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double sse = 0.0;
        for (double v : values) sse += (v - mean) * (v - mean);
        return sse;
    };

    SplitChoice best;
    const std::size_t n = X.rows();
    for (int f = 0; f < static_cast<int>(X.cols()); ++f) {
        std::vector<double> values;
        for (std::size_t r = 0; r < n; ++r)
            values.push_back(X(r, static_cast<std::size_t>(f)));
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 1; i < n; ++i) {
            if (sorted[i - 1] == sorted[i]) continue;
            double threshold = sorted[i - 1] + (sorted[i] - sorted[i - 1]) / 2.0;
            if (!(threshold < sorted[i])) threshold = sorted[i - 1];
            std::vector<double> left, right;
            for (std::size_t r = 0; r < n; ++r)
                (values[r] <= threshold ? left : right).push_back(y[r]);
            if (left.size() < static_cast<std::size_t>(min_samples_leaf) ||
                right.size() < static_cast<std::size_t>(min_samples_leaf))
                continue;
            double sse = sse_of(left) + sse_of(right);
            if (sse < best.sse) {
                best.sse = sse;
                best.feature = f;
                best.threshold = threshold;
            }
        }
    }
    return best;
}

// k-NN prediction by sorting all (distance, index) pairs.
inline double knn_prediction(const Matrix& X, const std::vector<double>& y,
                             int k, const std::vector<double>& query) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < X.cols(); ++c) {
            double diff = X(r, c) - query[c];
            d2 += diff * diff;
        }
        all.push_back({d2, r});
    }
    std::sort(all.begin(), all.end());
    all.resize(static_cast<std::size_t>(k));
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    double sum = 0.0;
    for (const auto& [d2, idx] : all) sum += y[idx];
    return sum / static_cast<double>(k);
}

} // namespace cropml::test::oracle

#endif
