#include "cropml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cropml/error.hpp"

namespace cropml::stats {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// The 7 analysis columns: features with yield spliced in after year,
// mirroring the input schema order.
std::vector<std::pair<std::string, std::vector<double>>>
analysis_columns(const Dataset& ds) {
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    cols.reserve(ds.n_features() + 1);
    for (std::size_t c = 0; c < ds.n_features(); ++c) {
        cols.emplace_back(ds.feature_names[c], ds.X.column(c));
        if (ds.feature_names[c] == "year") cols.emplace_back("yield", ds.y);
    }
    return cols;
}

} // namespace

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (sorted.size() == 1) return sorted[0];
    double pos = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return sorted[lo];
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

CorrelationMatrix correlation_matrix(const Dataset& ds) {
    if (ds.n_rows() < 2)
        throw DataError("correlation_matrix: fewer than 2 rows");

    auto cols = analysis_columns(ds);
    const std::size_t k = cols.size();
    const std::size_t n = ds.n_rows();

    std::vector<double> means(k);
    std::vector<std::vector<double>> centered(k, std::vector<double>(n));
    std::vector<double> sq_norm(k);
    for (std::size_t c = 0; c < k; ++c) {
        means[c] = mean_of(cols[c].second);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = cols[c].second[i] - means[c];
            centered[c][i] = d;
            sq += d * d;
        }
        sq_norm[c] = sq;
    }

    CorrelationMatrix corr;
    corr.names.reserve(k);
    for (const auto& [name, values] : cols) corr.names.push_back(name);
    corr.values = Matrix(k, k);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t a = 0; a < k; ++a) {
        corr.values(a, a) = 1.0;
        for (std::size_t b = a + 1; b < k; ++b) {
            double r;
            if (sq_norm[a] == 0.0 || sq_norm[b] == 0.0) {
                r = nan; // constant column: correlation undefined, not zero
            } else {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    dot += centered[a][i] * centered[b][i];
                r = dot / std::sqrt(sq_norm[a] * sq_norm[b]);
                r = std::clamp(r, -1.0, 1.0);
            }
            corr.values(a, b) = r;
            corr.values(b, a) = r;
        }
    }
    return corr;
}

std::vector<GroupAggregate> group_aggregate(const Dataset& ds,
                                            const std::string& group_by,
                                            const std::string& column) {
    const EncodingMap* map = nullptr;
    std::size_t group_col = 0;
    if (group_by == "item") {
        map = &ds.item_map;
        group_col = 1;
    } else if (group_by == "area") {
        map = &ds.area_map;
        group_col = 0;
    } else {
        throw UsageError("group_aggregate: group_by must be \"item\" or \"area\"");
    }

    std::vector<double> values = feature_column(ds, column);

    // std::map keeps keys in ascending byte order.
    std::map<std::string, std::vector<double>> groups;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        const std::string& key = map->label(static_cast<int>(ds.X(r, group_col)));
        groups[key].push_back(values[r]);
    }

    std::vector<GroupAggregate> out;
    out.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        GroupAggregate agg;
        agg.key = key;
        agg.count = members.size();
        agg.mean = mean_of(members);
        double sq = 0.0;
        agg.min = members[0];
        agg.max = members[0];
        agg.total = 0.0;
        for (double v : members) {
            sq += (v - agg.mean) * (v - agg.mean);
            agg.min = std::min(agg.min, v);
            agg.max = std::max(agg.max, v);
            agg.total += v;
        }
        agg.std_dev = std::sqrt(sq / static_cast<double>(members.size()));
        out.push_back(std::move(agg));
    }
    return out;
}

std::vector<BoxplotStats> boxplot_stats(const Dataset& ds) {
    std::map<std::string, std::vector<double>> groups;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        const std::string& key = ds.item_map.label(static_cast<int>(ds.X(r, 1)));
        groups[key].push_back(ds.y[r]);
    }

    std::vector<BoxplotStats> out;
    out.reserve(groups.size());
    for (auto& [key, values] : groups) {
        std::sort(values.begin(), values.end());
        BoxplotStats box;
        box.group = key;
        box.min = values.front();
        box.max = values.back();
        box.q1 = quantile_sorted(values, 0.25);
        box.median = quantile_sorted(values, 0.5);
        box.q3 = quantile_sorted(values, 0.75);
        double iqr = box.q3 - box.q1;
        double lo_fence = box.q1 - 1.5 * iqr;
        double hi_fence = box.q3 + 1.5 * iqr;

        // Most extreme points inside the fences; clamp to the box edge when a
        // side has no point inside its fence.
        double lo = box.q1;
        double hi = box.q3;
        for (double v : values) {
            if (v >= lo_fence) {
                lo = std::min(v, box.q1);
                break;
            }
        }
        for (auto it = values.rbegin(); it != values.rend(); ++it) {
            if (*it <= hi_fence) {
                hi = std::max(*it, box.q3);
                break;
            }
        }
        box.lower_whisker = lo;
        box.upper_whisker = hi;
        for (double v : values)
            if (v < box.lower_whisker || v > box.upper_whisker)
                ++box.outlier_count;
        out.push_back(std::move(box));
    }
    return out;
}

std::vector<ColumnSummary> describe(const Dataset& ds) {
    if (ds.n_rows() == 0) throw DataError("describe: empty dataset");

    std::vector<ColumnSummary> out;
    for (auto& [name, values] : analysis_columns(ds)) {
        ColumnSummary s;
        s.name = name;
        s.count = values.size();
        s.mean = mean_of(values);
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(sq / static_cast<double>(values.size()));
        std::sort(values.begin(), values.end());
        s.min = values.front();
        s.max = values.back();
        s.q1 = quantile_sorted(values, 0.25);
        s.median = quantile_sorted(values, 0.5);
        s.q3 = quantile_sorted(values, 0.75);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace cropml::stats
