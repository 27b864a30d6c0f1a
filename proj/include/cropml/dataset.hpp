#ifndef CROPML_DATASET_HPP
#define CROPML_DATASET_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cropml/matrix.hpp"

namespace cropml {

// One parsed CSV row of the crop-yield table.
struct RawRecord {
    std::string area;
    std::string item;
    long long year = 0;
    double yield_hg_ha = 0.0;
    double rainfall_mm = 0.0;
    double pesticides_tonnes = 0.0;
    double avg_temp_c = 0.0;
};

// Bidirectional label <-> integer code mapping. Codes are 0..n-1 in
// byte-wise sorted label order, so the encoding is reproducible.
class EncodingMap {
public:
    EncodingMap() = default;
    static EncodingMap from_labels(const std::vector<std::string>& labels);

    // -1 when the label is unknown.
    int code(const std::string& label) const;
    const std::string& label(int code) const;
    std::size_t size() const { return categories_.size(); }
    const std::vector<std::string>& categories() const { return categories_; }

    bool operator==(const EncodingMap& other) const {
        return categories_ == other.categories_;
    }

private:
    std::vector<std::string> categories_;
    std::unordered_map<std::string, int> index_of_;
};

// Cleaned numeric dataset: the single currency between modules.
// Feature column order is fixed:
//   [area_code, item_code, year, rainfall_mm, pesticides_tonnes, avg_temp_c]
struct Dataset {
    std::vector<std::string> feature_names;
    Matrix X;
    std::vector<double> y; // yield_hg_ha
    EncodingMap area_map;
    EncodingMap item_map;
    std::int64_t dropped_rows = 0;

    std::size_t n_rows() const { return X.rows(); }
    std::size_t n_features() const { return X.cols(); }
};

const std::vector<std::string>& feature_names();

// Required CSV header names, in canonical order:
//   Area, Item, Year, hg/ha_yield, average_rain_fall_mm_per_year,
//   pesticides_tonnes, avg_temp
const std::vector<std::string>& crop_csv_schema();

struct Diagnostic {
    std::size_t row = 0; // 1-based data row (header excluded)
    std::string field;
    std::string reason;

    std::string to_string() const;
};

struct LoadResult {
    std::vector<RawRecord> records;
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> ignored_columns;
};

// Parses the CSV at `path`. Columns are matched by name, so header order may
// differ from the schema; extra columns are ignored (reported in
// `ignored_columns`). Rows that fail to parse are excluded and reported as
// diagnostics. Throws DataError for a missing file, an empty file, or a
// header lacking a required column.
LoadResult load_csv(const std::string& path,
                    const std::vector<std::string>& schema = crop_csv_schema());

struct CleanResult {
    std::vector<RawRecord> records;
    std::int64_t dropped = 0;
};

// Drops records with any non-finite numeric field or a negative
// yield/rainfall/pesticides value. Stable order. Throws DataError when
// nothing survives.
CleanResult clean(const std::vector<RawRecord>& records);

// Encodes clean records into the numeric feature matrix. Area/Item label
// maps are built from the records themselves.
Dataset encode(const std::vector<RawRecord>& records);

// load_csv + clean + encode, with diagnostics surfaced to the caller.
Dataset load_dataset(const std::string& path,
                     std::vector<Diagnostic>* diagnostics = nullptr,
                     std::vector<std::string>* ignored_columns = nullptr);

struct SplitResult {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    double train_fraction = 0.0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Random train/test partition: indices are permuted by a Fisher-Yates
// shuffle driven by child_seed(seed, "split", 0); the first
// floor(train_fraction*n) permuted indices form the train set.
// Deterministic for fixed (ds, fraction, seed).
SplitResult split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// Column by name; "yield" returns the target. Throws UsageError for an
// unknown name.
std::vector<double> feature_column(const Dataset& ds, const std::string& name);

// Writes the dataset back in the input CSV schema (labels decoded). Numeric
// values use shortest round-trip formatting, so load_csv(write_csv(ds))
// reproduces every value exactly.
void write_csv(const Dataset& ds, const std::string& path);

// Row subset in the given index order, sharing the parent's encoders.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

} // namespace cropml

#endif
