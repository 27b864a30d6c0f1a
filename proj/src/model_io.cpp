#include "cropml/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cropml/error.hpp"
#include "cropml/rng.hpp"

namespace cropml {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

Json tree_to_json(const FlatTree& tree) {
    Json nodes = Json::array();
    for (const TreeNode& node : tree.nodes) {
        nodes.push_back({{"feature_index", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right},
                         {"value", node.value}});
    }
    return nodes;
}

FlatTree tree_from_json(const Json& nodes) {
    FlatTree tree;
    tree.nodes.reserve(nodes.size());
    for (const auto& j : nodes) {
        TreeNode node;
        node.feature = j.at("feature_index").get<std::int32_t>();
        node.threshold = j.at("threshold").get<double>();
        node.left = j.at("left").get<std::int32_t>();
        node.right = j.at("right").get<std::int32_t>();
        node.value = j.at("value").get<double>();
        tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw DataError("model file: empty tree");
    for (const TreeNode& node : tree.nodes) {
        if (node.is_leaf()) continue;
        auto count = static_cast<std::int32_t>(tree.nodes.size());
        if (node.left < 0 || node.left >= count || node.right < 0 ||
            node.right >= count)
            throw DataError("model file: tree child index out of range");
    }
    return tree;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != m.cols())
            throw DataError("model file: ragged matrix");
        for (std::size_t c = 0; c < m.cols(); ++c)
            m(r, c) = row[c].get<double>();
    }
    return m;
}

Json payload_to_json(const TrainedModel& model) {
    return std::visit(
        [](const auto& payload) -> Json {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                return {{"weights", payload.weights}, {"rank", payload.rank}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return {{"nodes", tree_to_json(payload.tree)}};
            } else if constexpr (std::is_same_v<T, EnsembleModel>) {
                Json trees = Json::array();
                for (const FlatTree& tree : payload.trees)
                    trees.push_back(tree_to_json(tree));
                return {{"trees", std::move(trees)}};
            } else if constexpr (std::is_same_v<T, BoostedModel>) {
                Json trees = Json::array();
                for (const FlatTree& tree : payload.trees)
                    trees.push_back(tree_to_json(tree));
                return {{"base_score", payload.base_score},
                        {"learning_rate", payload.learning_rate},
                        {"trees", std::move(trees)}};
            } else {
                return {{"k", payload.k},
                        {"scaled", payload.scaled},
                        {"feature_mean", payload.feature_mean},
                        {"feature_std", payload.feature_std},
                        {"X", matrix_to_json(payload.X)},
                        {"y", payload.y}};
            }
        },
        model.payload);
}

void payload_from_json(ModelKind kind, const Json& j, TrainedModel& model) {
    switch (kind) {
        case ModelKind::linear: {
            LinearModel m;
            m.weights = j.at("weights").get<std::vector<double>>();
            m.rank = j.at("rank").get<std::size_t>();
            model.payload = std::move(m);
            break;
        }
        case ModelKind::tree:
            model.payload = TreeModel{tree_from_json(j.at("nodes"))};
            break;
        case ModelKind::forest:
        case ModelKind::bagging: {
            EnsembleModel m;
            for (const auto& tree : j.at("trees"))
                m.trees.push_back(tree_from_json(tree));
            if (m.trees.empty()) throw DataError("model file: empty ensemble");
            model.payload = std::move(m);
            break;
        }
        case ModelKind::gbm:
        case ModelKind::xgb: {
            BoostedModel m;
            m.base_score = j.at("base_score").get<double>();
            m.learning_rate = j.at("learning_rate").get<double>();
            for (const auto& tree : j.at("trees"))
                m.trees.push_back(tree_from_json(tree));
            model.payload = std::move(m);
            break;
        }
        case ModelKind::knn: {
            KnnModel m;
            m.k = j.at("k").get<int>();
            m.scaled = j.at("scaled").get<bool>();
            m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
            m.feature_std = j.at("feature_std").get<std::vector<double>>();
            m.X = matrix_from_json(j.at("X"));
            m.y = j.at("y").get<std::vector<double>>();
            if (m.X.rows() != m.y.size())
                throw DataError("model file: knn X/y row mismatch");
            model.payload = std::move(m);
            break;
        }
    }
}

std::string checksum_hex(const Json& doc_without_checksum) {
    std::string canonical = doc_without_checksum.dump();
    std::uint64_t h = rng::fnv1a64(canonical.data(), canonical.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = to_string(model.spec.kind);
    doc["hyperparameters"] = model.spec.hyperparameters;
    doc["seed"] = model.spec.seed;
    doc["feature_names"] = model.feature_names;
    doc["encoders"] = {{"area", model.area_map.categories()},
                       {"item", model.item_map.categories()}};
    doc["payload"] = payload_to_json(model);
    doc["checksum"] = checksum_hex(doc);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw DataError("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);

    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed model file: " + std::string(e.what()));
    }

    try {
        int version = doc.at("format_version").get<int>();
        if (version != kFormatVersion)
            throw DataError("unsupported model format_version " +
                            std::to_string(version) + " (expected " +
                            std::to_string(kFormatVersion) + ")");

        std::string stored_checksum = doc.at("checksum").get<std::string>();
        Json verify = doc;
        verify.erase("checksum");
        if (checksum_hex(verify) != stored_checksum)
            throw DataError("model file checksum mismatch: " + path);

        std::string kind_name = doc.at("kind").get<std::string>();
        auto kind = model_kind_from_string(kind_name);
        if (!kind) throw DataError("unknown model kind: " + kind_name);

        TrainedModel model;
        model.spec.kind = *kind;
        model.spec.hyperparameters =
            doc.at("hyperparameters").get<HyperParams>();
        model.spec.seed = doc.at("seed").get<std::uint64_t>();
        model.feature_names =
            doc.at("feature_names").get<std::vector<std::string>>();
        model.area_map = EncodingMap::from_labels(
            doc.at("encoders").at("area").get<std::vector<std::string>>());
        model.item_map = EncodingMap::from_labels(
            doc.at("encoders").at("item").get<std::vector<std::string>>());
        payload_from_json(*kind, doc.at("payload"), model);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed model file: " + std::string(e.what()));
    }
}

} // namespace cropml
