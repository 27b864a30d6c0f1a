#ifndef CROPML_TREE_HPP
#define CROPML_TREE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "cropml/matrix.hpp"

namespace cropml {

// Regression tree node in flat-array form: root at index 0, children by
// index, leaves marked by feature == -1. This is also the serialized layout.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct FlatTree {
    std::vector<TreeNode> nodes;

    double predict_row(const double* row) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf()) {
            const TreeNode& nd = nodes[i];
            i = static_cast<std::size_t>(
                row[nd.feature] <= nd.threshold ? nd.left : nd.right);
        }
        return nodes[i].value;
    }

    bool operator==(const FlatTree&) const = default;
};

struct TreeParams {
    int max_depth = 0; // 0 = unlimited
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    // When 0 < max_features < n_features, each node searches a fresh random
    // feature subset drawn from child_seed(feature_seed, "node", node_index).
    int max_features = 0; // 0 = all features
    std::uint64_t feature_seed = 0;
};

// CART least-squares regression tree. Every feature and every midpoint
// between consecutive distinct sorted values is a candidate; the split
// minimizing SSE_left + SSE_right wins, ties broken by (lower feature index,
// then lower threshold). Leaves carry the mean target of their samples.
// `samples` indexes rows of X (duplicates allowed, e.g. bootstrap draws).
FlatTree grow_cart_tree(const Matrix& X, std::span<const double> y,
                        std::span<const std::int32_t> samples,
                        const TreeParams& params);

// Second-order boosting tree on squared loss: per-sample gradient g, unit
// hessian. Split gain is
//   1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma
// and a node splits only when the best gain is strictly positive. Leaf
// weight is -G/(H+lambda).
FlatTree grow_xgb_tree(const Matrix& X, std::span<const double> grad,
                       std::span<const std::int32_t> samples, int max_depth,
                       double lambda, double gamma);

} // namespace cropml

#endif
