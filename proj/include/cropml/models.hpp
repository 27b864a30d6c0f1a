#ifndef CROPML_MODELS_HPP
#define CROPML_MODELS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cropml/dataset.hpp"
#include "cropml/matrix.hpp"
#include "cropml/tree.hpp"

namespace cropml {

enum class ModelKind { linear, tree, forest, bagging, gbm, xgb, knn };

std::string to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(const std::string& name);

// All seven kinds, in the canonical comparison-report order.
const std::vector<ModelKind>& all_model_kinds();

using HyperParams = std::map<std::string, double>;

struct ModelSpec {
    ModelKind kind = ModelKind::linear;
    HyperParams hyperparameters; // missing keys take the per-kind default
    std::uint64_t seed = 0;
};

// Per-kind hyperparameter defaults. max_depth 0 means unlimited.
HyperParams default_hyperparameters(ModelKind kind);

// Throws UsageError for unknown keys or out-of-range values; returns the
// spec's hyperparameters merged over the defaults.
HyperParams validate_hyperparameters(const ModelSpec& spec);

// --- fitted payloads -------------------------------------------------------

struct LinearModel {
    std::vector<double> weights; // [intercept, w_1..w_p]
    std::size_t rank = 0;        // < weights.size() flags rank deficiency
};

struct TreeModel {
    FlatTree tree;
};

struct EnsembleModel { // forest and bagging
    std::vector<FlatTree> trees;
};

struct BoostedModel { // gbm and xgb
    double base_score = 0.0;
    double learning_rate = 1.0;
    std::vector<FlatTree> trees;
};

struct KnnModel {
    Matrix X; // standardized when scaled
    std::vector<double> y;
    int k = 1;
    bool scaled = false;
    std::vector<double> feature_mean; // empty when not scaled
    std::vector<double> feature_std;
};

struct TrainedModel {
    ModelSpec spec;
    std::vector<std::string> feature_names;
    EncodingMap area_map;
    EncodingMap item_map;
    std::variant<LinearModel, TreeModel, EnsembleModel, BoostedModel, KnnModel>
        payload;
};

// --- fitting ---------------------------------------------------------------

// Dispatches on spec.kind. Deterministic for fixed (spec, train): ensemble
// randomness derives from named child seeds of spec.seed, so results do not
// depend on `threads` (0 = one worker per hardware thread).
TrainedModel fit(const ModelSpec& spec, const Dataset& train, int threads = 1);

// Ordinary least squares on [1 | X]; rank-deficient designs take the
// minimum-norm solution.
LinearModel fit_linear(const Matrix& X, const std::vector<double>& y);

FlatTree fit_tree(const Matrix& X, const std::vector<double>& y,
                  const TreeParams& params);

struct ForestParams {
    int n_estimators = 100;
    int max_features = 0; // 0 = all features
    bool bootstrap = true;
    TreeParams tree;
    std::uint64_t seed = 0;
};

// Bootstrap sample i draws n indices with replacement from
// child_seed(seed, "boot", i); per-node feature subsets (when max_features
// restricts) come from child_seed(seed ^ hash("feat", i), "node", node_id).
// Trees may be fit on several workers; results are identical either way.
std::vector<FlatTree> fit_forest(const Matrix& X, const std::vector<double>& y,
                                 const ForestParams& params, int threads = 1);

BoostedModel fit_gbm(const Matrix& X, const std::vector<double>& y,
                     int n_estimators, double learning_rate,
                     const TreeParams& tree_params);

BoostedModel fit_xgb(const Matrix& X, const std::vector<double>& y,
                     int n_estimators, double learning_rate, double lambda,
                     double gamma, int max_depth);

KnnModel fit_knn(const Matrix& X, const std::vector<double>& y, int k,
                 bool scale);

// --- prediction --------------------------------------------------------------

std::vector<double> predict(const TrainedModel& model, const Matrix& X);
double predict_row(const TrainedModel& model, const double* row);

} // namespace cropml

#endif
