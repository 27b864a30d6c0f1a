#ifndef CROPML_METRICS_HPP
#define CROPML_METRICS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace cropml::metrics {

struct MapeResult {
    double value = 0.0;
    std::size_t excluded = 0; // rows skipped for |y| < 1e-12
};

double mae(const std::vector<double>& y, const std::vector<double>& yhat);

// Mean absolute percentage error as a unitless ratio (not percent). Rows
// with |y| < 1e-12 are excluded and counted.
MapeResult mape(const std::vector<double>& y, const std::vector<double>& yhat);

// 1 - SS_res/SS_tot. Constant y gives NaN.
double r2(const std::vector<double>& y, const std::vector<double>& yhat);

double mse(const std::vector<double>& y, const std::vector<double>& yhat);
double rmse(const std::vector<double>& y, const std::vector<double>& yhat);

// One comparison-report row. `accuracy` is an alias for r2: the report's
// Accuracy and R2 columns are identical by definition.
struct MetricsReport {
    std::string model_name;
    double accuracy = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    double r2 = 0.0;
    double mse = 0.0;
    std::size_t n_eval = 0;
    std::size_t mape_excluded = 0;
};

MetricsReport evaluate(const std::string& model_name,
                       const std::vector<double>& y,
                       const std::vector<double>& yhat);

} // namespace cropml::metrics

#endif
