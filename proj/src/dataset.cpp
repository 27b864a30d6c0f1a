#include "cropml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cropml/csv.hpp"
#include "cropml/error.hpp"
#include "cropml/rng.hpp"

namespace cropml {

namespace {

constexpr long long kYearMin = 1900;
constexpr long long kYearMax = 2100;

} // namespace

EncodingMap EncodingMap::from_labels(const std::vector<std::string>& labels) {
    EncodingMap map;
    std::set<std::string> distinct(labels.begin(), labels.end());
    map.categories_.assign(distinct.begin(), distinct.end());
    map.index_of_.reserve(map.categories_.size());
    for (std::size_t i = 0; i < map.categories_.size(); ++i)
        map.index_of_[map.categories_[i]] = static_cast<int>(i);
    return map;
}

int EncodingMap::code(const std::string& label) const {
    auto it = index_of_.find(label);
    return it == index_of_.end() ? -1 : it->second;
}

const std::string& EncodingMap::label(int code) const {
    if (code < 0 || static_cast<std::size_t>(code) >= categories_.size())
        throw UsageError("encoding code out of range: " + std::to_string(code));
    return categories_[static_cast<std::size_t>(code)];
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "area_code",         "item_code",  "year",
        "rainfall_mm", "pesticides_tonnes", "avg_temp_c"};
    return names;
}

const std::vector<std::string>& crop_csv_schema() {
    static const std::vector<std::string> schema = {
        "Area",
        "Item",
        "Year",
        "hg/ha_yield",
        "average_rain_fall_mm_per_year",
        "pesticides_tonnes",
        "avg_temp"};
    return schema;
}

std::string Diagnostic::to_string() const {
    std::ostringstream out;
    out << "row=" << row << " field=" << field << " reason=" << reason;
    return out.str();
}

LoadResult load_csv(const std::string& path,
                    const std::vector<std::string>& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line))
        throw DataError("empty file: " + path);

    // Strip a UTF-8 BOM if present.
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xef\xbb\xbf") == 0)
        header_line.erase(0, 3);

    std::vector<std::string> header = csv::split_line(header_line);

    LoadResult result;
    // Column positions matched by name; -1 = absent.
    std::vector<int> positions(schema.size(), -1);
    for (std::size_t h = 0; h < header.size(); ++h) {
        auto it = std::find(schema.begin(), schema.end(), header[h]);
        if (it == schema.end()) {
            result.ignored_columns.push_back(header[h]);
        } else {
            positions[static_cast<std::size_t>(it - schema.begin())] =
                static_cast<int>(h);
        }
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (positions[i] < 0) missing.push_back(schema[i]);
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) {
            if (!names.empty()) names += ", ";
            names += m;
        }
        throw DataError("header missing required column(s): " + names);
    }

    auto field_at = [&](const std::vector<std::string>& fields,
                        std::size_t schema_idx) -> const std::string& {
        static const std::string empty;
        int pos = positions[schema_idx];
        if (pos < 0 || static_cast<std::size_t>(pos) >= fields.size())
            return empty;
        return fields[static_cast<std::size_t>(pos)];
    };

    std::string line;
    std::size_t row_index = 0;
    bool saw_data_row = false;
    while (std::getline(in, line)) {
        ++row_index;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        saw_data_row = true;
        std::vector<std::string> fields = csv::split_line(line);

        RawRecord rec;
        rec.area = field_at(fields, 0);
        rec.item = field_at(fields, 1);

        bool ok = true;
        auto bad = [&](std::size_t schema_idx, const std::string& reason) {
            result.diagnostics.push_back({row_index, schema[schema_idx], reason});
            ok = false;
        };

        auto year = csv::parse_int(field_at(fields, 2));
        if (!year) bad(2, "non-numeric Year");
        else if (*year < kYearMin || *year > kYearMax)
            bad(2, "Year out of range [1900, 2100]");
        else rec.year = *year;

        const std::size_t numeric_fields[4] = {3, 4, 5, 6};
        double* slots[4] = {&rec.yield_hg_ha, &rec.rainfall_mm,
                            &rec.pesticides_tonnes, &rec.avg_temp_c};
        for (int k = 0; k < 4; ++k) {
            auto v = csv::parse_double(field_at(fields, numeric_fields[k]));
            if (!v) bad(numeric_fields[k], "non-numeric " + schema[numeric_fields[k]]);
            else *slots[k] = *v;
        }

        if (ok) result.records.push_back(std::move(rec));
    }

    if (!saw_data_row && result.records.empty())
        throw DataError("no data rows in file: " + path);
    return result;
}

CleanResult clean(const std::vector<RawRecord>& records) {
    CleanResult out;
    out.records.reserve(records.size());
    for (const auto& rec : records) {
        bool finite = std::isfinite(rec.yield_hg_ha) &&
                      std::isfinite(rec.rainfall_mm) &&
                      std::isfinite(rec.pesticides_tonnes) &&
                      std::isfinite(rec.avg_temp_c);
        bool non_negative = rec.yield_hg_ha >= 0.0 && rec.rainfall_mm >= 0.0 &&
                            rec.pesticides_tonnes >= 0.0;
        if (finite && non_negative) out.records.push_back(rec);
        else ++out.dropped;
    }
    if (out.records.empty()) throw DataError("empty dataset after cleaning");
    return out;
}

Dataset encode(const std::vector<RawRecord>& records) {
    if (records.empty()) throw DataError("encode: no records");

    std::vector<std::string> areas, items;
    areas.reserve(records.size());
    items.reserve(records.size());
    for (const auto& rec : records) {
        areas.push_back(rec.area);
        items.push_back(rec.item);
    }

    Dataset ds;
    ds.feature_names = feature_names();
    ds.area_map = EncodingMap::from_labels(areas);
    ds.item_map = EncodingMap::from_labels(items);
    ds.X = Matrix(records.size(), ds.feature_names.size());
    ds.y.resize(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        ds.X(r, 0) = static_cast<double>(ds.area_map.code(rec.area));
        ds.X(r, 1) = static_cast<double>(ds.item_map.code(rec.item));
        ds.X(r, 2) = static_cast<double>(rec.year);
        ds.X(r, 3) = rec.rainfall_mm;
        ds.X(r, 4) = rec.pesticides_tonnes;
        ds.X(r, 5) = rec.avg_temp_c;
        ds.y[r] = rec.yield_hg_ha;
    }
    return ds;
}

Dataset load_dataset(const std::string& path,
                     std::vector<Diagnostic>* diagnostics,
                     std::vector<std::string>* ignored_columns) {
    LoadResult loaded = load_csv(path);
    if (diagnostics) *diagnostics = loaded.diagnostics;
    if (ignored_columns) *ignored_columns = loaded.ignored_columns;
    if (loaded.records.empty())
        throw DataError("no parseable data rows in file: " + path);
    CleanResult cleaned = clean(loaded.records);
    Dataset ds = encode(cleaned.records);
    ds.dropped_rows = cleaned.dropped +
                      static_cast<std::int64_t>(loaded.diagnostics.size());
    return ds;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.area_map = ds.area_map;
    out.item_map = ds.item_map;
    out.X = Matrix(indices.size(), ds.n_features());
    out.y.resize(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        for (std::size_t c = 0; c < ds.n_features(); ++c)
            out.X(r, c) = ds.X(indices[r], c);
        out.y[r] = ds.y[indices[r]];
    }
    return out;
}

SplitResult split(const Dataset& ds, double train_fraction,
                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw UsageError("train_fraction must be in (0, 1)");
    const std::size_t n = ds.n_rows();
    if (n < 2) throw DataError("split: need at least 2 rows");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng::Xoshiro256ss gen(rng::child_seed(seed, "split", 0));
    rng::fisher_yates(order, gen);

    auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw UsageError("train_fraction leaves an empty train or test set");

    SplitResult result;
    result.seed = seed;
    result.train_fraction = train_fraction;
    result.train_indices.assign(order.begin(), order.begin() + n_train);
    result.test_indices.assign(order.begin() + n_train, order.end());
    result.train = subset(ds, result.train_indices);
    result.test = subset(ds, result.test_indices);
    return result;
}

std::vector<double> feature_column(const Dataset& ds, const std::string& name) {
    if (name == "yield") return ds.y;
    for (std::size_t c = 0; c < ds.feature_names.size(); ++c)
        if (ds.feature_names[c] == name) return ds.X.column(c);
    throw UsageError("unknown column: " + name);
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);

    const auto& schema = crop_csv_schema();
    out << csv::join_row(schema) << "\n";
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        std::vector<std::string> fields(schema.size());
        fields[0] = ds.area_map.label(static_cast<int>(ds.X(r, 0)));
        fields[1] = ds.item_map.label(static_cast<int>(ds.X(r, 1)));
        fields[2] = std::to_string(static_cast<long long>(ds.X(r, 2)));
        fields[3] = csv::format_double(ds.y[r]);
        fields[4] = csv::format_double(ds.X(r, 3));
        fields[5] = csv::format_double(ds.X(r, 4));
        fields[6] = csv::format_double(ds.X(r, 5));
        out << csv::join_row(fields) << "\n";
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace cropml
