#include "cropml/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cropml/csv.hpp"
#include "cropml/error.hpp"
#include "cropml/linalg.hpp"
#include "cropml/model_io.hpp"
#include "cropml/rng.hpp"

namespace cropml::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

Dataset load_with_diagnostics(const std::string& path) {
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> ignored;
    Dataset ds = load_dataset(path, &diagnostics, &ignored);
    if (!ignored.empty()) {
        std::cerr << "warning: ignoring extra column(s):";
        for (const auto& col : ignored) std::cerr << " " << col;
        std::cerr << "\n";
    }
    constexpr std::size_t kMaxShown = 100;
    for (std::size_t i = 0; i < diagnostics.size() && i < kMaxShown; ++i)
        std::cerr << diagnostics[i].to_string() << "\n";
    if (diagnostics.size() > kMaxShown)
        std::cerr << "... and " << diagnostics.size() - kMaxShown
                  << " more diagnostics\n";
    if (ds.dropped_rows > 0)
        std::cerr << "dropped " << ds.dropped_rows << " row(s) during cleaning\n";
    return ds;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

Json summary_to_json(const stats::ColumnSummary& s) {
    return {{"count", s.count}, {"mean", s.mean},     {"std", s.std_dev},
            {"min", s.min},     {"q1", s.q1},         {"median", s.median},
            {"q3", s.q3},       {"max", s.max}};
}

std::string metrics_csv_row(const metrics::MetricsReport& row) {
    // Accuracy and R2 are the same number; writing the same formatted string
    // keeps the two columns byte-identical.
    std::string r2_text = csv::format_double(row.r2);
    return row.model_name + "," + r2_text + "," + csv::format_double(row.mae) +
           "," + csv::format_double(row.mape) + "," + r2_text;
}

Json metrics_to_json(const metrics::MetricsReport& row) {
    return {{"model", row.model_name},
            {"accuracy", row.accuracy},
            {"mae", row.mae},
            {"mape", row.mape},
            {"r2", row.r2},
            {"mse", row.mse},
            {"n_eval", row.n_eval},
            {"mape_excluded", row.mape_excluded}};
}

} // namespace

RunConfig resolve(RunConfig config) {
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0))
        throw UsageError("train_fraction must be in (0, 1)");
    if (config.threads < 0) throw UsageError("threads must be >= 0");
    if (config.models.empty()) {
        for (ModelKind kind : all_model_kinds())
            config.models.push_back(ModelSpec{kind, {}, config.seed});
    }
    for (ModelSpec& spec : config.models) {
        spec.seed = config.seed;
        if (config.scale_knn && spec.kind == ModelKind::knn)
            spec.hyperparameters["scale"] = 1.0;
        spec.hyperparameters = validate_hyperparameters(spec);
    }
    return config;
}

std::string hash_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::uint64_t h = rng::kFnvOffset;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = rng::fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(hex);
}

std::string hash_split(const std::vector<std::size_t>& train_indices,
                       const std::vector<std::size_t>& test_indices) {
    std::uint64_t h = rng::kFnvOffset;
    auto mix = [&h](const std::vector<std::size_t>& indices) {
        for (std::size_t v : indices) {
            auto u = static_cast<std::uint64_t>(v);
            unsigned char bytes[8];
            for (int i = 0; i < 8; ++i)
                bytes[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
            h = rng::fnv1a64(bytes, 8, h);
        }
        h = rng::fnv1a64("|", h);
    };
    mix(train_indices);
    mix(test_indices);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(hex);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    Matrix design(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) design(i, 0) = x[i];
    LinearModel line = fit_linear(design, y);
    LineFit fit;
    fit.intercept = line.weights[0];
    fit.slope = line.weights[1];
    std::vector<double> yhat(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        yhat[i] = fit.intercept + fit.slope * x[i];
    fit.r2 = metrics::r2(y, yhat);
    return fit;
}

DescribeResult cmd_describe(const RunConfig& raw_config) {
    RunConfig config = resolve(raw_config);
    ensure_output_dir(config.output_dir);
    Dataset ds = load_with_diagnostics(config.data_path);

    DescribeResult result;
    result.corr = stats::correlation_matrix(ds);
    result.summaries = stats::describe(ds);

    std::ostringstream corr_csv;
    corr_csv << "";
    for (const auto& name : result.corr.names) corr_csv << "," << name;
    corr_csv << "\n";
    for (std::size_t r = 0; r < result.corr.names.size(); ++r) {
        corr_csv << result.corr.names[r];
        for (std::size_t c = 0; c < result.corr.names.size(); ++c)
            corr_csv << "," << csv::format_double(result.corr.values(r, c));
        corr_csv << "\n";
    }
    write_text_file(join_path(config.output_dir, "corr.csv"), corr_csv.str());

    Json describe_json = Json::object();
    for (const auto& s : result.summaries)
        describe_json[s.name] = summary_to_json(s);
    write_text_file(join_path(config.output_dir, "describe.json"),
                    describe_json.dump(2) + "\n");
    return result;
}

ComparisonReport cmd_compare(const RunConfig& raw_config) {
    RunConfig config = resolve(raw_config);
    if (config.models.empty()) throw UsageError("compare: no models selected");
    ensure_output_dir(config.output_dir);

    std::string dataset_hash = hash_file_bytes(config.data_path);
    Dataset ds = load_with_diagnostics(config.data_path);
    SplitResult parts = split(ds, config.train_fraction, config.seed);

    const Dataset& eval_set = config.report_train ? parts.train : parts.test;

    ComparisonReport report;
    report.meta.seed = config.seed;
    report.meta.train_fraction = config.train_fraction;
    report.meta.n_train = parts.train.n_rows();
    report.meta.n_test = parts.test.n_rows();
    report.meta.dataset_hash = dataset_hash;
    report.meta.split_hash = hash_split(parts.train_indices, parts.test_indices);
    report.meta.eval_set = config.report_train ? "train" : "test";

    for (const ModelSpec& spec : config.models) {
        TrainedModel model;
        try {
            model = fit(spec, parts.train, config.threads);
        } catch (const std::exception& e) {
            throw NumericError("model " + to_string(spec.kind) +
                               " failed: " + e.what());
        }
        std::vector<double> yhat = predict(model, eval_set.X);
        report.rows.push_back(
            metrics::evaluate(to_string(spec.kind), eval_set.y, yhat));

        if (config.emit.count("predictions") > 0) {
            std::ostringstream csv_text;
            csv_text << "actual,predicted\n";
            for (std::size_t i = 0; i < yhat.size(); ++i)
                csv_text << csv::format_double(eval_set.y[i]) << ","
                         << csv::format_double(yhat[i]) << "\n";
            write_text_file(join_path(config.output_dir,
                                      "pred_vs_actual_" + to_string(spec.kind) +
                                          ".csv"),
                            csv_text.str());
        }
    }

    write_comparison_csv(report, join_path(config.output_dir, "report.csv"));
    write_comparison_json(report, join_path(config.output_dir, "report.json"));

    if (config.emit.count("corr") > 0) cmd_describe(raw_config);
    if (config.emit.count("boxplot") > 0) cmd_boxplot_data(raw_config);
    return report;
}

void write_comparison_csv(const ComparisonReport& report,
                          const std::string& path) {
    std::ostringstream out;
    out << "Model,Accuracy,MAE,MAPE,R2\n";
    for (const auto& row : report.rows) out << metrics_csv_row(row) << "\n";
    write_text_file(path, out.str());
}

void write_comparison_json(const ComparisonReport& report,
                           const std::string& path) {
    Json doc;
    doc["metadata"] = {{"seed", report.meta.seed},
                       {"train_fraction", report.meta.train_fraction},
                       {"n_train", report.meta.n_train},
                       {"n_test", report.meta.n_test},
                       {"dataset_hash", report.meta.dataset_hash},
                       {"split_hash", report.meta.split_hash},
                       {"eval_set", report.meta.eval_set}};
    Json rows = Json::array();
    for (const auto& row : report.rows) rows.push_back(metrics_to_json(row));
    doc["rows"] = std::move(rows);
    write_text_file(path, doc.dump(2) + "\n");
}

std::string cmd_train(const RunConfig& raw_config, ModelKind kind,
                      bool full_data) {
    RunConfig config = resolve(raw_config);
    ensure_output_dir(config.output_dir);
    Dataset ds = load_with_diagnostics(config.data_path);

    ModelSpec spec{kind, {}, config.seed};
    for (const ModelSpec& candidate : config.models)
        if (candidate.kind == kind) spec = candidate;

    TrainedModel model;
    metrics::MetricsReport train_metrics;
    if (full_data) {
        model = fit(spec, ds, config.threads);
        train_metrics =
            metrics::evaluate(to_string(kind), ds.y, predict(model, ds.X));
        std::cout << "train (full data, n=" << ds.n_rows()
                  << "): r2=" << csv::format_double(train_metrics.r2)
                  << " mae=" << csv::format_double(train_metrics.mae) << "\n";
    } else {
        SplitResult parts = split(ds, config.train_fraction, config.seed);
        model = fit(spec, parts.train, config.threads);
        train_metrics = metrics::evaluate(to_string(kind), parts.train.y,
                                          predict(model, parts.train.X));
        auto test_metrics = metrics::evaluate(to_string(kind), parts.test.y,
                                              predict(model, parts.test.X));
        std::cout << "train (n=" << parts.train.n_rows()
                  << "): r2=" << csv::format_double(train_metrics.r2)
                  << " mae=" << csv::format_double(train_metrics.mae) << "\n";
        std::cout << "test  (n=" << parts.test.n_rows()
                  << "): r2=" << csv::format_double(test_metrics.r2)
                  << " mae=" << csv::format_double(test_metrics.mae) << "\n";
    }

    if (auto* linear = std::get_if<LinearModel>(&model.payload);
        linear && linear->rank < linear->weights.size())
        std::cerr << "warning: rank-deficient design (rank " << linear->rank
                  << " of " << linear->weights.size()
                  << "); minimum-norm solution taken\n";

    std::string path =
        join_path(config.output_dir, "model_" + to_string(kind) + ".json");
    save_model(model, path);
    std::cout << "wrote " << path << "\n";
    return path;
}

std::size_t cmd_predict(const std::string& model_path,
                        const std::string& input_csv,
                        const std::string& output_csv) {
    TrainedModel model = load_model(model_path);

    std::ifstream in(input_csv, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + input_csv);
    std::string header_line;
    if (!std::getline(in, header_line))
        throw DataError("empty file: " + input_csv);
    if (!header_line.empty() && header_line.back() == '\r')
        header_line.pop_back();
    std::vector<std::string> header = csv::split_line(header_line);

    // The six feature columns; yield may be present and is ignored.
    const auto& schema = crop_csv_schema();
    std::vector<int> positions(schema.size(), -1);
    for (std::size_t h = 0; h < header.size(); ++h) {
        auto it = std::find(schema.begin(), schema.end(), header[h]);
        if (it != schema.end())
            positions[static_cast<std::size_t>(it - schema.begin())] =
                static_cast<int>(h);
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (i != 3 && positions[i] < 0) missing.push_back(schema[i]);
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) {
            if (!names.empty()) names += ", ";
            names += m;
        }
        throw DataError("input missing required column(s): " + names);
    }

    struct PendingRow {
        std::string raw;
        std::array<double, 6> features;
    };
    std::vector<PendingRow> rows;
    std::set<std::string> unseen_areas;
    std::set<std::string> unseen_items;

    std::string line;
    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        ++row_index;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::vector<std::string> fields = csv::split_line(line);
        auto field_at = [&](std::size_t schema_idx) -> const std::string& {
            static const std::string empty;
            int pos = positions[schema_idx];
            if (pos < 0 || static_cast<std::size_t>(pos) >= fields.size())
                return empty;
            return fields[static_cast<std::size_t>(pos)];
        };

        PendingRow row;
        row.raw = line;
        if (!row.raw.empty() && row.raw.back() == '\r') row.raw.pop_back();

        const std::string& area = field_at(0);
        const std::string& item = field_at(1);
        int area_code = model.area_map.code(area);
        int item_code = model.item_map.code(item);
        if (area_code < 0) unseen_areas.insert(area);
        if (item_code < 0) unseen_items.insert(item);

        auto year = csv::parse_int(field_at(2));
        auto rain = csv::parse_double(field_at(4));
        auto pest = csv::parse_double(field_at(5));
        auto temp = csv::parse_double(field_at(6));
        if (!year || !rain || !pest || !temp)
            throw DataError("predict: row " + std::to_string(row_index) +
                            " has a non-numeric feature field");

        row.features = {static_cast<double>(area_code),
                        static_cast<double>(item_code),
                        static_cast<double>(*year),
                        *rain,
                        *pest,
                        *temp};
        rows.push_back(std::move(row));
    }

    if (!unseen_areas.empty() || !unseen_items.empty()) {
        std::string msg = "unseen labels:";
        for (const auto& a : unseen_areas) msg += " Area=" + a;
        for (const auto& i : unseen_items) msg += " Item=" + i;
        throw DataError(msg);
    }

    std::ofstream out(output_csv, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + output_csv);
    out << header_line << ",predicted_yield\n";
    for (const PendingRow& row : rows) {
        double pred = predict_row(model, row.features.data());
        out << row.raw << "," << csv::format_double(pred) << "\n";
    }
    if (!out) throw DataError("write failed: " + output_csv);
    return rows.size();
}

LineFit cmd_export_predictions(const RunConfig& raw_config, ModelKind kind) {
    RunConfig config = resolve(raw_config);
    ensure_output_dir(config.output_dir);
    Dataset ds = load_with_diagnostics(config.data_path);
    SplitResult parts = split(ds, config.train_fraction, config.seed);

    ModelSpec spec{kind, {}, config.seed};
    for (const ModelSpec& candidate : config.models)
        if (candidate.kind == kind) spec = candidate;

    TrainedModel model = fit(spec, parts.train, config.threads);
    std::vector<double> yhat = predict(model, parts.test.X);

    std::ostringstream csv_text;
    csv_text << "actual,predicted\n";
    for (std::size_t i = 0; i < yhat.size(); ++i)
        csv_text << csv::format_double(parts.test.y[i]) << ","
                 << csv::format_double(yhat[i]) << "\n";
    std::string name = "pred_vs_actual_" + to_string(kind);
    write_text_file(join_path(config.output_dir, name + ".csv"),
                    csv_text.str());

    LineFit line = fit_line(parts.test.y, yhat);
    Json line_json = {{"model", to_string(kind)},
                      {"slope", line.slope},
                      {"intercept", line.intercept},
                      {"r2", line.r2},
                      {"n", yhat.size()}};
    write_text_file(join_path(config.output_dir, name + "_line.json"),
                    line_json.dump(2) + "\n");
    return line;
}

std::vector<stats::BoxplotStats> cmd_boxplot_data(const RunConfig& raw_config) {
    RunConfig config = resolve(raw_config);
    ensure_output_dir(config.output_dir);
    Dataset ds = load_with_diagnostics(config.data_path);

    std::vector<stats::BoxplotStats> boxes = stats::boxplot_stats(ds);
    std::stable_sort(boxes.begin(), boxes.end(),
                     [](const stats::BoxplotStats& a,
                        const stats::BoxplotStats& b) {
                         return a.median > b.median;
                     });

    Json items = Json::array();
    for (const auto& box : boxes) {
        items.push_back({{"item", box.group},
                         {"min", box.min},
                         {"q1", box.q1},
                         {"median", box.median},
                         {"q3", box.q3},
                         {"max", box.max},
                         {"lower_whisker", box.lower_whisker},
                         {"upper_whisker", box.upper_whisker},
                         {"outlier_count", box.outlier_count}});
    }
    write_text_file(join_path(config.output_dir, "boxplot_by_item.json"),
                    items.dump(2) + "\n");
    return boxes;
}

} // namespace cropml::cli
