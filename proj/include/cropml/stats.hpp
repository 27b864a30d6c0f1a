#ifndef CROPML_STATS_HPP
#define CROPML_STATS_HPP

#include <string>
#include <vector>

#include "cropml/dataset.hpp"
#include "cropml/matrix.hpp"

namespace cropml::stats {

// 7x7 Pearson correlation over the 6 features plus yield, in the order
// [area_code, item_code, year, yield, rainfall_mm, pesticides_tonnes,
//  avg_temp_c]. Constant columns correlate as NaN against everything but
// themselves.
struct CorrelationMatrix {
    std::vector<std::string> names;
    Matrix values;
};

struct GroupAggregate {
    std::string key;
    std::size_t count = 0;
    double mean = 0.0;
    double std_dev = 0.0; // population (divisor n)
    double min = 0.0;
    double max = 0.0;
    double total = 0.0;
};

struct BoxplotStats {
    std::string group;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double lower_whisker = 0.0;
    double upper_whisker = 0.0;
    std::size_t outlier_count = 0;
};

struct ColumnSummary {
    std::string name;
    std::size_t count = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

// Quantile by linear interpolation between order statistics at position
// p*(n-1) over the sorted values (0-indexed).
double quantile_sorted(const std::vector<double>& sorted, double p);

CorrelationMatrix correlation_matrix(const Dataset& ds);

// One aggregate per distinct group label, sorted ascending by label.
// group_by is "item" or "area"; column is a feature name or "yield".
std::vector<GroupAggregate> group_aggregate(const Dataset& ds,
                                            const std::string& group_by,
                                            const std::string& column);

// Per-item yield boxplot summaries: Tukey fences at 1.5*IQR, whiskers at
// the most extreme points inside the fences (clamped to the box when a side
// has no point inside its fence).
std::vector<BoxplotStats> boxplot_stats(const Dataset& ds);

// Per-column summary over the 6 features plus yield.
std::vector<ColumnSummary> describe(const Dataset& ds);

} // namespace cropml::stats

#endif
