#include "cropml/metrics.hpp"

#include <cmath>
#include <limits>

#include "cropml/error.hpp"

namespace cropml::metrics {

namespace {

constexpr double kZeroTarget = 1e-12;

void check_lengths(const std::vector<double>& y,
                   const std::vector<double>& yhat) {
    if (y.size() != yhat.size())
        throw NumericError("metric: length mismatch (" +
                           std::to_string(y.size()) + " vs " +
                           std::to_string(yhat.size()) + ")");
    if (y.empty()) throw NumericError("metric: empty vectors");
}

} // namespace

double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
    check_lengths(y, yhat);
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - yhat[i]);
    return sum / static_cast<double>(y.size());
}

MapeResult mape(const std::vector<double>& y, const std::vector<double>& yhat) {
    check_lengths(y, yhat);
    MapeResult out;
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::abs(y[i]) < kZeroTarget) {
            ++out.excluded;
            continue;
        }
        sum += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
        ++used;
    }
    if (used == 0) throw DataError("mape: all rows have zero targets");
    out.value = sum / static_cast<double>(used);
    return out;
}

double r2(const std::vector<double>& y, const std::vector<double>& yhat) {
    check_lengths(y, yhat);
    if (y.size() < 2) throw NumericError("r2: need at least 2 rows");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - ss_res / ss_tot;
}

double mse(const std::vector<double>& y, const std::vector<double>& yhat) {
    check_lengths(y, yhat);
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        sum += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return sum / static_cast<double>(y.size());
}

double rmse(const std::vector<double>& y, const std::vector<double>& yhat) {
    return std::sqrt(mse(y, yhat));
}

MetricsReport evaluate(const std::string& model_name,
                       const std::vector<double>& y,
                       const std::vector<double>& yhat) {
    MetricsReport report;
    report.model_name = model_name;
    report.mae = mae(y, yhat);
    MapeResult mp = mape(y, yhat);
    report.mape = mp.value;
    report.mape_excluded = mp.excluded;
    report.r2 = r2(y, yhat);
    report.accuracy = report.r2;
    report.mse = mse(y, yhat);
    report.n_eval = y.size();
    return report;
}

} // namespace cropml::metrics
