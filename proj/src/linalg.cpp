#include "cropml/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cropml/error.hpp"

namespace cropml::linalg {

namespace {

// Householder reflector for x = v[from..n): overwrites v with the reflector
// vector (v[from] adjusted, rest unchanged) and returns (alpha, vtv) where
// alpha is the resulting pivot value. vtv == 0 means x was already zero.
struct Reflector {
    double alpha = 0.0;
    double vtv = 0.0;
};

Reflector make_reflector(std::vector<double>& v, std::size_t from) {
    double norm_sq = 0.0;
    for (std::size_t i = from; i < v.size(); ++i) norm_sq += v[i] * v[i];
    double norm = std::sqrt(norm_sq);
    Reflector h;
    if (norm == 0.0) return h;
    double alpha = v[from] >= 0.0 ? -norm : norm;
    v[from] -= alpha;
    h.alpha = alpha;
    for (std::size_t i = from; i < v.size(); ++i) h.vtv += v[i] * v[i];
    return h;
}

} // namespace

LeastSquaresResult solve_least_squares(const Matrix& A,
                                       const std::vector<double>& b) {
    const std::size_t n = A.rows();
    const std::size_t m = A.cols();
    if (n == 0 || m == 0) throw NumericError("least squares: empty system");
    if (b.size() != n)
        throw NumericError("least squares: dimension mismatch");

    Matrix W = A;
    std::vector<double> c = b;
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    const std::size_t kmax = std::min(n, m);
    std::vector<double> col(n);
    double tol = -1.0;
    std::size_t rank = kmax;

    for (std::size_t k = 0; k < kmax; ++k) {
        // Column pivot: largest trailing norm.
        std::size_t pivot = k;
        double best = -1.0;
        for (std::size_t j = k; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += W(i, j) * W(i, j);
            if (s > best) {
                best = s;
                pivot = j;
            }
        }
        double pivot_norm = std::sqrt(std::max(best, 0.0));
        if (tol < 0.0) {
            tol = static_cast<double>(std::max(n, m)) *
                  std::numeric_limits<double>::epsilon() * pivot_norm;
        }
        if (pivot_norm <= tol) {
            rank = k;
            break;
        }
        if (pivot != k) {
            for (std::size_t i = 0; i < n; ++i)
                std::swap(W(i, k), W(i, pivot));
            std::swap(perm[k], perm[pivot]);
        }

        for (std::size_t i = 0; i < n; ++i) col[i] = W(i, k);
        Reflector h = make_reflector(col, k);
        if (h.vtv == 0.0) {
            rank = k;
            break;
        }
        // Apply H = I - 2vv^T/(v^T v) to the remaining columns and to b.
        for (std::size_t j = k + 1; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += col[i] * W(i, j);
            double f = 2.0 * dot / h.vtv;
            for (std::size_t i = k; i < n; ++i) W(i, j) -= f * col[i];
        }
        {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += col[i] * c[i];
            double f = 2.0 * dot / h.vtv;
            for (std::size_t i = k; i < n; ++i) c[i] -= f * col[i];
        }
        W(k, k) = h.alpha;
        for (std::size_t i = k + 1; i < n; ++i) W(i, k) = 0.0;
    }

    LeastSquaresResult result;
    result.rank = rank;
    result.x.assign(m, 0.0);
    if (rank == 0) return result; // A ~ 0: minimum-norm solution is 0

    if (rank == m) {
        // Unique solution: back-substitute R x = c[0..m).
        std::vector<double> xp(m, 0.0);
        for (std::size_t ii = m; ii-- > 0;) {
            double s = c[ii];
            for (std::size_t j = ii + 1; j < m; ++j) s -= W(ii, j) * xp[j];
            xp[ii] = s / W(ii, ii);
        }
        for (std::size_t j = 0; j < m; ++j) result.x[perm[j]] = xp[j];
        return result;
    }

    // Rank-deficient: minimum-norm solution of R1 w = c1 where R1 is the
    // leading rank x m trapezoid. Factor R1^T = U S (thin QR); the solution
    // w = U S^-T c1 lies in the row space of R1, hence has minimum norm.
    const std::size_t r = rank;
    Matrix B(m, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m; ++j) B(j, i) = W(i, j);

    std::vector<std::vector<double>> reflectors;
    std::vector<double> vtvs;
    reflectors.reserve(r);
    std::vector<double> bcol(m);
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t i = 0; i < m; ++i) bcol[i] = B(i, k);
        Reflector h = make_reflector(bcol, k);
        if (h.vtv == 0.0)
            throw NumericError("least squares: inconsistent rank in min-norm solve");
        for (std::size_t j = k + 1; j < r; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += bcol[i] * B(i, j);
            double f = 2.0 * dot / h.vtv;
            for (std::size_t i = k; i < m; ++i) B(i, j) -= f * bcol[i];
        }
        B(k, k) = h.alpha;
        for (std::size_t i = k + 1; i < m; ++i) B(i, k) = 0.0;
        reflectors.push_back(bcol);
        vtvs.push_back(h.vtv);
    }

    // Forward-substitute S^T z = c1 (S upper triangular r x r in B).
    std::vector<double> z(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        double s = c[i];
        for (std::size_t j = 0; j < i; ++j) s -= B(j, i) * z[j];
        z[i] = s / B(i, i);
    }

    // w = U z = Q_B [z; 0]: apply the reflectors in reverse order.
    std::vector<double> w(m, 0.0);
    std::copy(z.begin(), z.end(), w.begin());
    for (std::size_t kk = r; kk-- > 0;) {
        const auto& v = reflectors[kk];
        double dot = 0.0;
        for (std::size_t i = kk; i < m; ++i) dot += v[i] * w[i];
        double f = 2.0 * dot / vtvs[kk];
        for (std::size_t i = kk; i < m; ++i) w[i] -= f * v[i];
    }
    for (std::size_t j = 0; j < m; ++j) result.x[perm[j]] = w[j];
    return result;
}

} // namespace cropml::linalg
