#include "cropml/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "cropml/error.hpp"
#include "cropml/linalg.hpp"
#include "cropml/rng.hpp"

namespace cropml {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::vector<std::int32_t> identity_indices(std::size_t n) {
    std::vector<std::int32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

int as_int(const HyperParams& hp, const std::string& key) {
    return static_cast<int>(hp.at(key));
}

TreeParams tree_params_from(const HyperParams& hp, std::uint64_t feature_seed,
                            int max_features) {
    TreeParams p;
    p.max_depth = as_int(hp, "max_depth");
    p.min_samples_split = as_int(hp, "min_samples_split");
    p.min_samples_leaf = as_int(hp, "min_samples_leaf");
    p.max_features = max_features;
    p.feature_seed = feature_seed;
    return p;
}

int resolve_workers(int threads, int jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    int workers = threads > 0 ? threads : static_cast<int>(hw ? hw : 1);
    return std::max(1, std::min(workers, jobs));
}

} // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::linear: return "linear";
        case ModelKind::tree: return "tree";
        case ModelKind::forest: return "forest";
        case ModelKind::bagging: return "bagging";
        case ModelKind::gbm: return "gbm";
        case ModelKind::xgb: return "xgb";
        case ModelKind::knn: return "knn";
    }
    return "unknown";
}

std::optional<ModelKind> model_kind_from_string(const std::string& name) {
    for (ModelKind kind : all_model_kinds())
        if (to_string(kind) == name) return kind;
    return std::nullopt;
}

const std::vector<ModelKind>& all_model_kinds() {
    static const std::vector<ModelKind> kinds = {
        ModelKind::linear, ModelKind::forest, ModelKind::gbm, ModelKind::xgb,
        ModelKind::knn,    ModelKind::tree,   ModelKind::bagging};
    return kinds;
}

HyperParams default_hyperparameters(ModelKind kind) {
    switch (kind) {
        case ModelKind::linear:
            return {};
        case ModelKind::tree:
            return {{"max_depth", 0},
                    {"min_samples_split", 2},
                    {"min_samples_leaf", 1}};
        case ModelKind::forest:
            return {{"n_estimators", 100}, {"max_features", 6},
                    {"bootstrap", 1},      {"max_depth", 0},
                    {"min_samples_split", 2}, {"min_samples_leaf", 1}};
        case ModelKind::bagging:
            return {{"n_estimators", 100},   {"bootstrap", 1},
                    {"max_depth", 0},        {"min_samples_split", 2},
                    {"min_samples_leaf", 1}};
        case ModelKind::gbm:
            return {{"n_estimators", 100},   {"learning_rate", 0.1},
                    {"max_depth", 3},        {"min_samples_split", 2},
                    {"min_samples_leaf", 1}};
        case ModelKind::xgb:
            return {{"n_estimators", 100},
                    {"learning_rate", 0.3},
                    {"lambda", 1.0},
                    {"gamma", 0.0},
                    {"max_depth", 6}};
        case ModelKind::knn:
            return {{"k", 5}, {"scale", 0}};
    }
    return {};
}

HyperParams validate_hyperparameters(const ModelSpec& spec) {
    HyperParams merged = default_hyperparameters(spec.kind);
    for (const auto& [key, value] : spec.hyperparameters) {
        auto it = merged.find(key);
        if (it == merged.end())
            throw UsageError("unknown hyperparameter for " +
                             to_string(spec.kind) + ": " + key);
        it->second = value;
    }

    auto require = [&](const std::string& key, bool ok,
                       const std::string& what) {
        if (!ok)
            throw UsageError(to_string(spec.kind) + "." + key + " " + what);
    };
    for (const auto& [key, value] : merged) {
        if (key == "n_estimators") {
            // Boosters accept 0 rounds (base score only); averaged ensembles
            // need at least one member.
            bool booster = spec.kind == ModelKind::gbm || spec.kind == ModelKind::xgb;
            require(key, value >= (booster ? 0 : 1),
                    booster ? "must be >= 0" : "must be >= 1");
        } else if (key == "learning_rate") {
            require(key, value > 0, "must be > 0");
        } else if (key == "max_depth") {
            require(key, value >= 0, "must be >= 1, or 0 for unlimited");
        } else if (key == "min_samples_split") {
            require(key, value >= 2, "must be >= 2");
        } else if (key == "min_samples_leaf") {
            require(key, value >= 1, "must be >= 1");
        } else if (key == "max_features") {
            require(key, value >= 1, "must be >= 1");
        } else if (key == "lambda" || key == "gamma") {
            require(key, value >= 0, "must be >= 0");
        } else if (key == "k") {
            require(key, value >= 1, "must be >= 1");
        } else if (key == "bootstrap" || key == "scale") {
            require(key, value == 0 || value == 1, "must be 0 or 1");
        }
    }
    return merged;
}

LinearModel fit_linear(const Matrix& X, const std::vector<double>& y) {
    if (X.rows() == 0) throw DataError("fit_linear: empty training set");
    Matrix design(X.rows(), X.cols() + 1);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        design(r, 0) = 1.0;
        for (std::size_t c = 0; c < X.cols(); ++c) design(r, c + 1) = X(r, c);
    }
    auto solved = linalg::solve_least_squares(design, y);
    return LinearModel{std::move(solved.x), solved.rank};
}

FlatTree fit_tree(const Matrix& X, const std::vector<double>& y,
                  const TreeParams& params) {
    if (X.rows() == 0) throw DataError("fit_tree: empty training set");
    auto idx = identity_indices(X.rows());
    return grow_cart_tree(X, y, idx, params);
}

std::vector<FlatTree> fit_forest(const Matrix& X, const std::vector<double>& y,
                                 const ForestParams& params, int threads) {
    const std::size_t n = X.rows();
    if (n == 0) throw DataError("fit_forest: empty training set");
    if (params.n_estimators < 1)
        throw UsageError("fit_forest: n_estimators must be >= 1");
    int max_features = params.max_features == 0 ? static_cast<int>(X.cols())
                                                : params.max_features;
    if (max_features < 1 || max_features > static_cast<int>(X.cols()))
        throw UsageError("fit_forest: max_features out of range");

    std::vector<FlatTree> trees(static_cast<std::size_t>(params.n_estimators));

    auto fit_one = [&](std::size_t t) {
        std::vector<std::int32_t> sample;
        if (params.bootstrap) {
            rng::Xoshiro256ss boot(rng::child_seed(params.seed, "boot", t));
            sample.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                sample[i] = static_cast<std::int32_t>(boot.uniform(n));
        } else {
            sample = identity_indices(n);
        }
        TreeParams tp = params.tree;
        tp.max_features = max_features;
        tp.feature_seed = rng::child_seed(params.seed, "feat", t);
        trees[t] = grow_cart_tree(X, y, sample, tp);
    };

    int workers = resolve_workers(threads, params.n_estimators);
    if (workers <= 1) {
        for (std::size_t t = 0; t < trees.size(); ++t) fit_one(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < trees.size();
                     t = next.fetch_add(1))
                    fit_one(t);
            });
        }
        for (auto& th : pool) th.join();
    }
    return trees;
}

BoostedModel fit_gbm(const Matrix& X, const std::vector<double>& y,
                     int n_estimators, double learning_rate,
                     const TreeParams& tree_params) {
    if (X.rows() == 0) throw DataError("fit_gbm: empty training set");
    BoostedModel model;
    model.base_score = mean_of(y);
    model.learning_rate = learning_rate;

    const std::size_t n = X.rows();
    auto idx = identity_indices(n);
    std::vector<double> current(n, model.base_score);
    std::vector<double> residual(n);
    for (int round = 0; round < n_estimators; ++round) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - current[i];
        FlatTree tree = grow_cart_tree(X, residual, idx, tree_params);
        for (std::size_t i = 0; i < n; ++i)
            current[i] += learning_rate * tree.predict_row(X.row_ptr(i));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

BoostedModel fit_xgb(const Matrix& X, const std::vector<double>& y,
                     int n_estimators, double learning_rate, double lambda,
                     double gamma, int max_depth) {
    if (X.rows() == 0) throw DataError("fit_xgb: empty training set");
    BoostedModel model;
    model.base_score = mean_of(y);
    model.learning_rate = learning_rate;

    const std::size_t n = X.rows();
    auto idx = identity_indices(n);
    std::vector<double> current(n, model.base_score);
    std::vector<double> grad(n);
    for (int round = 0; round < n_estimators; ++round) {
        for (std::size_t i = 0; i < n; ++i) grad[i] = current[i] - y[i];
        FlatTree tree = grow_xgb_tree(X, grad, idx, max_depth, lambda, gamma);
        for (std::size_t i = 0; i < n; ++i)
            current[i] += learning_rate * tree.predict_row(X.row_ptr(i));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

KnnModel fit_knn(const Matrix& X, const std::vector<double>& y, int k,
                 bool scale) {
    const std::size_t n = X.rows();
    if (n == 0) throw DataError("fit_knn: empty training set");
    if (k < 1) throw UsageError("k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw UsageError("fit_knn: k exceeds training rows (" +
                         std::to_string(k) + " > " + std::to_string(n) + ")");

    KnnModel model;
    model.k = k;
    model.scaled = scale;
    model.y = y;
    if (!scale) {
        model.X = X;
        return model;
    }

    const std::size_t p = X.cols();
    model.feature_mean.assign(p, 0.0);
    model.feature_std.assign(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += X(r, c);
        model.feature_mean[c] = s / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double d = X(r, c) - model.feature_mean[c];
            sq += d * d;
        }
        model.feature_std[c] = std::sqrt(sq / static_cast<double>(n));
    }
    model.X = Matrix(n, p);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < p; ++c) {
            double sd = model.feature_std[c];
            // Constant features standardize to 0 instead of dividing by 0.
            model.X(r, c) = sd > 0.0 ? (X(r, c) - model.feature_mean[c]) / sd : 0.0;
        }
    return model;
}

TrainedModel fit(const ModelSpec& spec, const Dataset& train, int threads) {
    if (train.n_rows() == 0) throw DataError("fit: empty training set");
    HyperParams hp = validate_hyperparameters(spec);

    TrainedModel model;
    model.spec = spec;
    model.spec.hyperparameters = hp;
    model.feature_names = train.feature_names;
    model.area_map = train.area_map;
    model.item_map = train.item_map;

    switch (spec.kind) {
        case ModelKind::linear:
            model.payload = fit_linear(train.X, train.y);
            break;
        case ModelKind::tree:
            model.payload = TreeModel{fit_tree(train.X, train.y,
                                               tree_params_from(hp, 0, 0))};
            break;
        case ModelKind::forest:
        case ModelKind::bagging: {
            ForestParams fp;
            fp.n_estimators = as_int(hp, "n_estimators");
            // Bagging is the forest trainer with every feature in play.
            fp.max_features = spec.kind == ModelKind::forest
                                  ? as_int(hp, "max_features")
                                  : static_cast<int>(train.n_features());
            fp.bootstrap = as_int(hp, "bootstrap") != 0;
            fp.tree = tree_params_from(hp, 0, 0);
            fp.seed = spec.seed;
            model.payload = EnsembleModel{
                fit_forest(train.X, train.y, fp, threads)};
            break;
        }
        case ModelKind::gbm:
            model.payload = fit_gbm(train.X, train.y, as_int(hp, "n_estimators"),
                                    hp.at("learning_rate"),
                                    tree_params_from(hp, 0, 0));
            break;
        case ModelKind::xgb:
            model.payload = fit_xgb(train.X, train.y, as_int(hp, "n_estimators"),
                                    hp.at("learning_rate"), hp.at("lambda"),
                                    hp.at("gamma"), as_int(hp, "max_depth"));
            break;
        case ModelKind::knn:
            model.payload = fit_knn(train.X, train.y, as_int(hp, "k"),
                                    as_int(hp, "scale") != 0);
            break;
    }
    return model;
}

namespace {

double predict_linear(const LinearModel& m, const double* row, std::size_t p) {
    double out = m.weights[0];
    for (std::size_t c = 0; c < p; ++c) out += m.weights[c + 1] * row[c];
    return out;
}

double predict_knn(const KnnModel& m, const double* row) {
    const std::size_t n = m.X.rows();
    const std::size_t p = m.X.cols();
    const auto k = static_cast<std::size_t>(m.k);

    std::vector<double> query(row, row + p);
    if (m.scaled)
        for (std::size_t c = 0; c < p; ++c)
            query[c] = m.feature_std[c] > 0.0
                           ? (query[c] - m.feature_mean[c]) / m.feature_std[c]
                           : 0.0;

    // Max-heap of the k best (distance, index) pairs; equal distances favor
    // the lower training row.
    using Entry = std::pair<double, std::size_t>;
    std::vector<Entry> heap;
    heap.reserve(k);
    auto worse = [](const Entry& a, const Entry& b) {
        return a.first < b.first || (a.first == b.first && a.second < b.second);
    };
    for (std::size_t r = 0; r < n; ++r) {
        double d2 = 0.0;
        const double* tr = m.X.row_ptr(r);
        for (std::size_t c = 0; c < p; ++c) {
            double diff = tr[c] - query[c];
            d2 += diff * diff;
        }
        Entry e{d2, r};
        if (heap.size() < k) {
            heap.push_back(e);
            std::push_heap(heap.begin(), heap.end(), worse);
        } else if (worse(e, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), worse);
            heap.back() = e;
            std::push_heap(heap.begin(), heap.end(), worse);
        }
    }
    // Average in training-row order for a reproducible summation order.
    std::sort(heap.begin(), heap.end(),
              [](const Entry& a, const Entry& b) { return a.second < b.second; });
    double sum = 0.0;
    for (const Entry& e : heap) sum += m.y[e.second];
    return sum / static_cast<double>(heap.size());
}

} // namespace

double predict_row(const TrainedModel& model, const double* row) {
    const std::size_t p = model.feature_names.size();
    return std::visit(
        [&](const auto& payload) -> double {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                return predict_linear(payload, row, p);
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return payload.tree.predict_row(row);
            } else if constexpr (std::is_same_v<T, EnsembleModel>) {
                double sum = 0.0;
                for (const FlatTree& tree : payload.trees)
                    sum += tree.predict_row(row);
                return sum / static_cast<double>(payload.trees.size());
            } else if constexpr (std::is_same_v<T, BoostedModel>) {
                double out = payload.base_score;
                for (const FlatTree& tree : payload.trees)
                    out += payload.learning_rate * tree.predict_row(row);
                return out;
            } else {
                return predict_knn(payload, row);
            }
        },
        model.payload);
}

std::vector<double> predict(const TrainedModel& model, const Matrix& X) {
    if (X.rows() > 0 && X.cols() != model.feature_names.size())
        throw UsageError("predict: expected " +
                         std::to_string(model.feature_names.size()) +
                         " feature columns, got " + std::to_string(X.cols()));
    std::vector<double> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r)
        out[r] = predict_row(model, X.row_ptr(r));
    return out;
}

} // namespace cropml
