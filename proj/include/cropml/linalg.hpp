#ifndef CROPML_LINALG_HPP
#define CROPML_LINALG_HPP

#include <cstddef>
#include <vector>

#include "cropml/matrix.hpp"

namespace cropml::linalg {

struct LeastSquaresResult {
    std::vector<double> x;
    std::size_t rank = 0;
};

// Minimizes ||A x - b||_2 via Householder QR with column pivoting.
// Rank-deficient systems return the minimum-norm solution (the row-space
// component, computed from a second QR of the leading rows' transpose).
LeastSquaresResult solve_least_squares(const Matrix& A,
                                       const std::vector<double>& b);

} // namespace cropml::linalg

#endif
