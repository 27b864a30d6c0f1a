#include "cli_app.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cropml/commands.hpp"
#include "cropml/csv.hpp"
#include "cropml/error.hpp"

namespace cropml::cli {

namespace {

using Json = nlohmann::ordered_json;

// One subcommand's shared flags. CLI11 counts let a config file fill any
// value the user did not set explicitly.
struct CommonOpts {
    std::string data_path;
    std::string output_dir = ".";
    std::string config_path;
    std::string models_list;
    std::string emit_list;
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
    int threads = 0;
    bool scale_knn = false;

    CLI::App* cmd = nullptr;
    std::map<std::string, double> overrides; // "kind.param" -> value

    void attach(CLI::App* sub, bool needs_data) {
        cmd = sub;
        auto* data = sub->add_option("--data", data_path,
                                     "input CSV with the crop-yield schema");
        if (needs_data) data->required();
        sub->add_option("--out", output_dir, "output directory (default .)");
        sub->add_option("--config", config_path,
                        "JSON config; explicit flags override its values");
        sub->add_option("--seed", seed, "PRNG seed (default 42)");
        sub->add_option("--train-fraction", train_fraction,
                        "train fraction in (0,1), default 0.8");
        sub->add_option("--models", models_list,
                        "comma list of model kinds (default: all seven)");
        sub->add_option("--threads", threads,
                        "worker cap for ensemble fitting; 0 = auto");
        sub->add_flag("--scale-knn", scale_knn,
                      "standardize features for the knn model");
        sub->add_option("--emit", emit_list,
                        "extra compare artifacts: corr,boxplot,predictions");

        // Per-model hyperparameter overrides, e.g. --gbm.learning_rate=0.05
        for (ModelKind kind : all_model_kinds()) {
            for (const auto& [param, value] : default_hyperparameters(kind)) {
                std::string flag = "--" + to_string(kind) + "." + param;
                std::string key = to_string(kind) + "." + param;
                sub->add_option_function<double>(
                       flag,
                       [this, key](double v) { overrides[key] = v; },
                       "override " + key + " (default " +
                           csv::format_double(value) + ")")
                    ->expected(1);
            }
        }
    }

    bool was_set(const std::string& flag) const {
        return cmd->count(flag) > 0;
    }
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

ModelKind parse_kind(const std::string& name) {
    auto kind = model_kind_from_string(name);
    if (!kind)
        throw UsageError("unknown model kind: " + name +
                         " (expected one of linear, tree, forest, bagging, "
                         "gbm, xgb, knn)");
    return *kind;
}

// Merges config-file values under explicit flags and builds the RunConfig.
RunConfig build_config(CommonOpts& opts) {
    Json file;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw UsageError("cannot open config file: " + opts.config_path);
        try {
            file = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("malformed config file: " + std::string(e.what()));
        }
    }

    auto pick_string = [&](const char* flag, const char* key,
                           std::string& slot) {
        if (!opts.was_set(flag) && file.contains(key))
            slot = file.at(key).get<std::string>();
    };
    pick_string("--data", "data", opts.data_path);
    pick_string("--out", "out", opts.output_dir);
    if (!opts.was_set("--seed") && file.contains("seed"))
        opts.seed = file.at("seed").get<std::uint64_t>();
    if (!opts.was_set("--train-fraction") && file.contains("train_fraction"))
        opts.train_fraction = file.at("train_fraction").get<double>();
    if (!opts.was_set("--threads") && file.contains("threads"))
        opts.threads = file.at("threads").get<int>();
    if (!opts.was_set("--scale-knn") && file.contains("scale_knn"))
        opts.scale_knn = file.at("scale_knn").get<bool>();

    std::vector<std::string> model_names;
    if (opts.was_set("--models")) {
        model_names = split_list(opts.models_list);
    } else if (file.contains("models")) {
        model_names = file.at("models").get<std::vector<std::string>>();
    }

    std::map<std::string, double> merged_overrides;
    if (file.contains("hyperparameters"))
        for (const auto& [key, value] : file.at("hyperparameters").items())
            merged_overrides[key] = value.get<double>();
    for (const auto& [key, value] : opts.overrides) merged_overrides[key] = value;

    RunConfig config;
    config.data_path = opts.data_path;
    config.output_dir = opts.output_dir;
    config.seed = opts.seed;
    config.train_fraction = opts.train_fraction;
    config.threads = opts.threads;
    config.scale_knn = opts.scale_knn;

    std::vector<std::string> emit_names;
    if (opts.was_set("--emit")) emit_names = split_list(opts.emit_list);
    else if (file.contains("emit"))
        emit_names = file.at("emit").get<std::vector<std::string>>();
    for (const auto& name : emit_names) {
        if (name != "corr" && name != "boxplot" && name != "predictions" &&
            name != "report")
            throw UsageError("unknown --emit artifact: " + name);
        config.emit.insert(name);
    }

    for (const auto& name : model_names)
        config.models.push_back(ModelSpec{parse_kind(name), {}, config.seed});
    if (config.models.empty())
        for (ModelKind kind : all_model_kinds())
            config.models.push_back(ModelSpec{kind, {}, config.seed});

    for (const auto& [key, value] : merged_overrides) {
        auto dot = key.find('.');
        if (dot == std::string::npos)
            throw UsageError("hyperparameter override must be kind.param: " + key);
        ModelKind kind = parse_kind(key.substr(0, dot));
        std::string param = key.substr(dot + 1);
        for (ModelSpec& spec : config.models)
            if (spec.kind == kind) spec.hyperparameters[param] = value;
    }
    return config;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"crop-yield tabular regression toolkit"};
    app.require_subcommand(1);

    CommonOpts describe_opts, compare_opts, train_opts, export_opts, box_opts;
    std::string train_kind, export_kind;
    bool train_full = false;
    bool report_train = false;

    describe_opts.attach(
        app.add_subcommand("describe",
                           "write descriptive summary and correlation matrix"),
        true);

    compare_opts.attach(
        app.add_subcommand("compare",
                           "train every model on one shared split and write "
                           "the comparison report"),
        true);
    compare_opts.cmd->add_flag("--report-train", report_train,
                               "report metrics on the train split instead");

    train_opts.attach(
        app.add_subcommand("train", "fit one model and save it as JSON"), true);
    train_opts.cmd
        ->add_option("--model-kind", train_kind, "which model kind to fit")
        ->required();
    train_opts.cmd->add_flag("--full", train_full,
                             "fit on the full dataset instead of the train split");

    auto* predict_cmd =
        app.add_subcommand("predict", "score a feature CSV with a saved model");
    std::string model_path, input_csv, output_csv = "predictions.csv";
    predict_cmd->add_option("--model", model_path, "model JSON file")->required();
    predict_cmd->add_option("--input", input_csv, "feature CSV to score")
        ->required();
    predict_cmd->add_option("--out-file", output_csv,
                            "output CSV (default predictions.csv)");

    export_opts.attach(
        app.add_subcommand("export-predictions",
                           "write actual,predicted pairs for one model over "
                           "the test split"),
        true);
    export_opts.cmd
        ->add_option("--model-kind", export_kind, "which model kind to export")
        ->required();

    box_opts.attach(app.add_subcommand("boxplot-data",
                                       "write per-item yield boxplot stats"),
                    true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (describe_opts.cmd->parsed()) {
            cmd_describe(build_config(describe_opts));
        } else if (compare_opts.cmd->parsed()) {
            RunConfig config = build_config(compare_opts);
            config.report_train = report_train;
            ComparisonReport report = cmd_compare(config);
            std::cout << "Model,Accuracy,MAE,MAPE,R2\n";
            for (const auto& row : report.rows)
                std::cout << row.model_name << ","
                          << csv::format_double(row.r2) << ","
                          << csv::format_double(row.mae) << ","
                          << csv::format_double(row.mape) << ","
                          << csv::format_double(row.r2) << "\n";
        } else if (train_opts.cmd->parsed()) {
            cmd_train(build_config(train_opts), parse_kind(train_kind),
                      train_full);
        } else if (predict_cmd->parsed()) {
            std::size_t n = cmd_predict(model_path, input_csv, output_csv);
            std::cout << "wrote " << n << " prediction(s) to " << output_csv
                      << "\n";
        } else if (export_opts.cmd->parsed()) {
            LineFit line =
                cmd_export_predictions(build_config(export_opts),
                                       parse_kind(export_kind));
            std::cout << "fit line: predicted = "
                      << csv::format_double(line.slope) << " * actual + "
                      << csv::format_double(line.intercept)
                      << " (r2=" << csv::format_double(line.r2) << ")\n";
        } else if (box_opts.cmd->parsed()) {
            cmd_boxplot_data(build_config(box_opts));
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace cropml::cli
