#include "cropml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cropml/error.hpp"
#include "cropml/rng.hpp"

namespace cropml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct WorkItem {
    std::size_t lo;
    std::size_t hi;
    int depth;
    std::int32_t parent; // -1 for the root
    bool is_left;
};

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double score = kInf; // cost for CART, negated gain for xgb
};

// Candidate threshold between two consecutive distinct sorted values. The
// midpoint can round up to the right value; fall back to the left value so
// `x <= threshold` keeps exactly the scanned left block.
double midpoint(double a, double b) {
    double t = a + (b - a) / 2.0;
    if (!(t < b)) t = a;
    return t;
}

// Fresh uniform feature subset of size k, ascending. Partial Fisher-Yates
// seeded per node so tree growth is order- and thread-independent.
std::vector<int> feature_subset(int n_features, int k, std::uint64_t node_seed,
                                std::vector<int>& scratch) {
    scratch.resize(static_cast<std::size_t>(n_features));
    std::iota(scratch.begin(), scratch.end(), 0);
    rng::Xoshiro256ss gen(node_seed);
    for (int i = 0; i < k; ++i) {
        auto j = static_cast<std::size_t>(i) +
                 static_cast<std::size_t>(gen.uniform(
                     static_cast<std::uint64_t>(n_features - i)));
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[j]);
    }
    std::vector<int> subset(scratch.begin(), scratch.begin() + k);
    std::sort(subset.begin(), subset.end());
    return subset;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const std::int32_t> samples)
        : X_(X), idx_(samples.begin(), samples.end()) {}

    // Stable in-place partition of idx_[lo,hi) by x[feature] <= threshold.
    // Returns the boundary.
    std::size_t partition(std::size_t lo, std::size_t hi, int feature,
                          double threshold) {
        right_buf_.clear();
        std::size_t write = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            std::int32_t s = idx_[i];
            if (X_(static_cast<std::size_t>(s),
                   static_cast<std::size_t>(feature)) <= threshold)
                idx_[write++] = s;
            else
                right_buf_.push_back(s);
        }
        std::copy(right_buf_.begin(), right_buf_.end(), idx_.begin() + write);
        return write;
    }

    // Sorts (feature value, signal) pairs for idx_[lo,hi) into pairs_.
    void fill_sorted(std::size_t lo, std::size_t hi, int feature,
                     std::span<const double> signal) {
        pairs_.resize(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            auto s = static_cast<std::size_t>(idx_[i]);
            pairs_[i - lo] = {X_(s, static_cast<std::size_t>(feature)),
                              signal[s]};
        }
        std::sort(pairs_.begin(), pairs_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    const Matrix& X_;
    std::vector<std::int32_t> idx_;
    std::vector<std::pair<double, double>> pairs_;
    std::vector<std::int32_t> right_buf_;
    std::vector<int> feat_scratch_;
};

std::int32_t append_node(FlatTree& tree, const WorkItem& item) {
    auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (item.parent >= 0) {
        TreeNode& parent = tree.nodes[static_cast<std::size_t>(item.parent)];
        (item.is_left ? parent.left : parent.right) = id;
    }
    return id;
}

} // namespace

FlatTree grow_cart_tree(const Matrix& X, std::span<const double> y,
                        std::span<const std::int32_t> samples,
                        const TreeParams& params) {
    if (samples.empty()) throw NumericError("grow_cart_tree: no samples");
    const auto n_features = static_cast<int>(X.cols());
    const int min_leaf = std::max(1, params.min_samples_leaf);
    const int min_split = std::max(2, params.min_samples_split);
    const bool subsample_features =
        params.max_features > 0 && params.max_features < n_features;

    TreeBuilder builder(X, samples);
    FlatTree tree;
    tree.nodes.reserve(2 * samples.size());

    std::vector<WorkItem> stack;
    stack.push_back({0, samples.size(), 0, -1, false});

    std::vector<int> all_features(static_cast<std::size_t>(n_features));
    std::iota(all_features.begin(), all_features.end(), 0);

    while (!stack.empty()) {
        WorkItem item = stack.back();
        stack.pop_back();
        std::int32_t id = append_node(tree, item);

        const std::size_t lo = item.lo;
        const std::size_t hi = item.hi;
        const auto m = hi - lo;

        double sum_y = 0.0;
        double sum_sq = 0.0;
        bool pure = true;
        const double first_y = y[static_cast<std::size_t>(builder.idx_[lo])];
        for (std::size_t i = lo; i < hi; ++i) {
            double v = y[static_cast<std::size_t>(builder.idx_[i])];
            sum_y += v;
            sum_sq += v * v;
            pure = pure && v == first_y;
        }
        const double mean = sum_y / static_cast<double>(m);

        auto make_leaf = [&] {
            tree.nodes[static_cast<std::size_t>(id)].value = mean;
        };

        bool depth_limited = params.max_depth > 0 && item.depth >= params.max_depth;
        if (pure || depth_limited || m < static_cast<std::size_t>(min_split)) {
            make_leaf();
            continue;
        }

        const std::vector<int>& features =
            subsample_features
                ? feature_subset(n_features, params.max_features,
                                 rng::child_seed(params.feature_seed, "node",
                                                 static_cast<std::uint64_t>(id)),
                                 builder.feat_scratch_)
                : all_features;

        BestSplit best;
        for (int f : features) {
            builder.fill_sorted(lo, hi, f, y);
            const auto& pairs = builder.pairs_;
            double sl = 0.0;
            double sql = 0.0;
            for (std::size_t i = 1; i < m; ++i) {
                double yv = pairs[i - 1].second;
                sl += yv;
                sql += yv * yv;
                if (pairs[i - 1].first == pairs[i].first) continue;
                auto nl = static_cast<double>(i);
                auto nr = static_cast<double>(m - i);
                if (i < static_cast<std::size_t>(min_leaf) ||
                    m - i < static_cast<std::size_t>(min_leaf))
                    continue;
                double sr = sum_y - sl;
                double sqr = sum_sq - sql;
                double cost = (sql - sl * sl / nl) + (sqr - sr * sr / nr);
                if (cost < best.score) {
                    best.score = cost;
                    best.feature = f;
                    best.threshold = midpoint(pairs[i - 1].first, pairs[i].first);
                }
            }
        }

        if (best.feature < 0) {
            make_leaf();
            continue;
        }

        std::size_t mid = builder.partition(lo, hi, best.feature, best.threshold);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        // Right pushed first so the left child pops next and node ids follow
        // pre-order.
        stack.push_back({mid, hi, item.depth + 1, id, false});
        stack.push_back({lo, mid, item.depth + 1, id, true});
    }
    return tree;
}

FlatTree grow_xgb_tree(const Matrix& X, std::span<const double> grad,
                       std::span<const std::int32_t> samples, int max_depth,
                       double lambda, double gamma) {
    if (samples.empty()) throw NumericError("grow_xgb_tree: no samples");

    TreeBuilder builder(X, samples);
    FlatTree tree;

    std::vector<WorkItem> stack;
    stack.push_back({0, samples.size(), 0, -1, false});

    const auto n_features = static_cast<int>(X.cols());

    while (!stack.empty()) {
        WorkItem item = stack.back();
        stack.pop_back();
        std::int32_t id = append_node(tree, item);

        const std::size_t lo = item.lo;
        const std::size_t hi = item.hi;
        const auto m = hi - lo;

        double sum_g = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            sum_g += grad[static_cast<std::size_t>(builder.idx_[i])];
        const double h_total = static_cast<double>(m); // unit hessians

        auto make_leaf = [&] {
            tree.nodes[static_cast<std::size_t>(id)].value =
                -sum_g / (h_total + lambda);
        };

        bool depth_limited = max_depth > 0 && item.depth >= max_depth;
        if (depth_limited || m < 2) {
            make_leaf();
            continue;
        }

        const double parent_term = sum_g * sum_g / (h_total + lambda);
        BestSplit best;
        best.score = 0.0; // gains must beat zero strictly
        for (int f = 0; f < n_features; ++f) {
            builder.fill_sorted(lo, hi, f, grad);
            const auto& pairs = builder.pairs_;
            double gl = 0.0;
            for (std::size_t i = 1; i < m; ++i) {
                gl += pairs[i - 1].second;
                if (pairs[i - 1].first == pairs[i].first) continue;
                auto hl = static_cast<double>(i);
                auto hr = static_cast<double>(m - i);
                double gr = sum_g - gl;
                double gain =
                    0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                           parent_term) -
                    gamma;
                if (gain > best.score) {
                    best.score = gain;
                    best.feature = f;
                    best.threshold = midpoint(pairs[i - 1].first, pairs[i].first);
                }
            }
        }

        if (best.feature < 0) {
            make_leaf();
            continue;
        }

        std::size_t mid = builder.partition(lo, hi, best.feature, best.threshold);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        stack.push_back({mid, hi, item.depth + 1, id, false});
        stack.push_back({lo, mid, item.depth + 1, id, true});
    }
    return tree;
}

} // namespace cropml
