#ifndef CROPML_COMMANDS_HPP
#define CROPML_COMMANDS_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cropml/dataset.hpp"
#include "cropml/metrics.hpp"
#include "cropml/models.hpp"
#include "cropml/stats.hpp"

namespace cropml::cli {

struct RunConfig {
    std::string data_path;
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
    std::vector<ModelSpec> models; // empty = all seven with defaults
    std::string output_dir = ".";
    std::set<std::string> emit; // extra compare artifacts: corr, boxplot, predictions
    int threads = 0;            // 0 = auto
    bool report_train = false;  // evaluate on the train split instead
    bool scale_knn = false;
};

// Resolves defaults: fills `models` with all seven kinds when empty and
// applies scale_knn. Validates fraction/model specs.
RunConfig resolve(RunConfig config);

struct ComparisonReport {
    struct Metadata {
        std::uint64_t seed = 0;
        double train_fraction = 0.0;
        std::size_t n_train = 0;
        std::size_t n_test = 0;
        std::string dataset_hash; // FNV-1a of the input file bytes
        std::string split_hash;   // FNV-1a of the train/test index partition
        std::string eval_set;     // "test" or "train"
    };

    std::vector<metrics::MetricsReport> rows; // config order
    Metadata meta;
};

struct DescribeResult {
    std::vector<stats::ColumnSummary> summaries;
    stats::CorrelationMatrix corr;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// describe: writes corr.csv and describe.json into output_dir.
DescribeResult cmd_describe(const RunConfig& config);

// compare: one shared split, every model fit on the identical train rows,
// report.csv + report.json written. Byte-identical outputs for identical
// input bytes and flags, regardless of thread count.
ComparisonReport cmd_compare(const RunConfig& config);

// train: fits one model (train split, or the full dataset with full_data),
// writes model_<kind>.json, returns the path. Train/test metrics go to
// stdout.
std::string cmd_train(const RunConfig& config, ModelKind kind, bool full_data);

// predict: scores a raw feature CSV with a saved model; output is the input
// columns plus predicted_yield. Unseen Area/Item labels are an error that
// lists the labels.
std::size_t cmd_predict(const std::string& model_path,
                        const std::string& input_csv,
                        const std::string& output_csv);

// export-predictions: writes pred_vs_actual_<kind>.csv (actual,predicted
// over the test split) plus the OLS line of predicted ~ actual.
LineFit cmd_export_predictions(const RunConfig& config, ModelKind kind);

// boxplot-data: writes boxplot_by_item.json, groups sorted by median
// descending.
std::vector<stats::BoxplotStats> cmd_boxplot_data(const RunConfig& config);

// Helpers shared with the acceptance suite.
std::string hash_file_bytes(const std::string& path);
std::string hash_split(const std::vector<std::size_t>& train_indices,
                       const std::vector<std::size_t>& test_indices);
void write_comparison_csv(const ComparisonReport& report,
                          const std::string& path);
void write_comparison_json(const ComparisonReport& report,
                           const std::string& path);
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace cropml::cli

#endif
