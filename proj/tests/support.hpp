#ifndef CROPML_TESTS_SUPPORT_HPP
#define CROPML_TESTS_SUPPORT_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "cropml/csv.hpp"
#include "cropml/dataset.hpp"
#include "cropml/matrix.hpp"
#include "cropml/rng.hpp"

namespace cropml::test {

inline std::string labeled(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%03d", prefix, i);
    return std::string(buf);
}

// Dataset with the standard 6 feature columns and synthetic encoders sized
// to the codes present in columns 0 and 1.
inline Dataset make_dataset(const Matrix& X, const std::vector<double>& y) {
    Dataset ds;
    ds.feature_names = feature_names();
    ds.X = X;
    ds.y = y;
    int max_area = 0;
    int max_item = 0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        max_area = std::max(max_area, static_cast<int>(X(r, 0)));
        max_item = std::max(max_item, static_cast<int>(X(r, 1)));
    }
    std::vector<std::string> areas, items;
    for (int i = 0; i <= max_area; ++i) areas.push_back(labeled("area", i));
    for (int i = 0; i <= max_item; ++i) items.push_back(labeled("item", i));
    ds.area_map = EncodingMap::from_labels(areas);
    ds.item_map = EncodingMap::from_labels(items);
    return ds;
}

inline Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = base / ("cropml_test_" + tag + "_" + std::to_string(stamp) +
                        "_" + std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }
    std::string str() const { return path_.string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// Deterministic standard normal via Box-Muller on the project PRNG.
inline double gaussian(rng::Xoshiro256ss& gen) {
    double u1 = gen.next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double u2 = gen.next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

// --- synthetic crop table ----------------------------------------------------
//
// Generator for a crop-yield table with the same shape as the public data:
// a few thousand (area, item, year) cells where yield is a multiplicative
// area x item lookup plus mild year drift and lognormal noise, rainfall is
// constant per area, and pesticide tonnage tracks how much agriculture an
// area runs (which correlates with yield and rainfall). Tree learners can
// memorize the lookup; a linear model on ordinal codes cannot; unscaled
// nearest neighbors collapse onto the pesticide axis.

struct SynthConfig {
    int n_areas = 115;
    int n_items = 10;
    int year_min = 1990;
    int year_max = 2013;
    std::uint64_t seed = 20240715;
    double yield_noise = 0.10;
    double interaction_sd = 0.35;
    double keep_prob = 0.98;
};

inline const std::vector<std::pair<std::string, double>>& synth_items() {
    static const std::vector<std::pair<std::string, double>> items = {
        {"Cassava", 1.05e5},       {"Maize", 5.5e4},
        {"Plantains", 3.6e4},      {"Potatoes", 1.75e5},
        {"Rice, paddy", 4.1e4},    {"Sorghum", 1.3e4},
        {"Soybeans", 1.6e4},       {"Sweet potatoes", 1.1e5},
        {"Wheat", 2.9e4},          {"Yams", 8.2e4}};
    return items;
}

inline std::vector<RawRecord> synth_records(const SynthConfig& cfg) {
    rng::Xoshiro256ss gen(cfg.seed);
    const auto& items = synth_items();
    const int n_items = std::min(cfg.n_items, static_cast<int>(items.size()));

    std::vector<double> quality(cfg.n_areas);
    std::vector<double> rainfall(cfg.n_areas);
    std::vector<double> base_temp(cfg.n_areas);
    std::vector<double> ag_scale(cfg.n_areas);
    for (int a = 0; a < cfg.n_areas; ++a) {
        quality[a] = std::clamp(std::exp(0.6 * gaussian(gen)), 0.2, 5.0);
        rainfall[a] = std::exp(std::log(100.0) +
                               gen.next_double() *
                                   (std::log(3000.0) - std::log(100.0)));
        base_temp[a] = 1.0 + gen.next_double() * 27.0;
        ag_scale[a] = (20.0 + 2.5e4 * std::pow(quality[a], 1.3) *
                                  std::sqrt(rainfall[a] / 3000.0)) *
                      std::exp(0.7 * gaussian(gen));
    }

    std::vector<std::vector<double>> interaction(
        cfg.n_areas, std::vector<double>(n_items));
    for (int a = 0; a < cfg.n_areas; ++a)
        for (int i = 0; i < n_items; ++i)
            interaction[a][i] = std::exp(cfg.interaction_sd * gaussian(gen));

    std::vector<RawRecord> records;
    for (int a = 0; a < cfg.n_areas; ++a) {
        for (int i = 0; i < n_items; ++i) {
            for (int year = cfg.year_min; year <= cfg.year_max; ++year) {
                if (gen.next_double() > cfg.keep_prob) continue;
                double t = static_cast<double>(year - 2000);
                double season =
                    1.0 + 0.004 * t +
                    0.02 * std::sin(2.0 * 3.14159265358979323846 *
                                    static_cast<double>(year - cfg.year_min) / 7.0);
                RawRecord rec;
                rec.area = labeled("Country", a);
                rec.item = items[static_cast<std::size_t>(i)].first;
                rec.year = year;
                rec.rainfall_mm = std::round(rainfall[a]);
                rec.pesticides_tonnes =
                    ag_scale[a] * (1.0 + 0.01 * static_cast<double>(year - cfg.year_min)) *
                    std::exp(0.1 * gaussian(gen));
                rec.avg_temp_c = base_temp[a] + 0.4 * gaussian(gen);
                rec.yield_hg_ha = items[static_cast<std::size_t>(i)].second *
                                  quality[a] * interaction[a][i] * season *
                                  std::exp(cfg.yield_noise * gaussian(gen));
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

inline void write_crop_csv(const std::vector<RawRecord>& records,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << csv::join_row(crop_csv_schema()) << "\n";
    for (const auto& rec : records) {
        std::vector<std::string> fields = {
            rec.area,
            rec.item,
            std::to_string(rec.year),
            csv::format_double(rec.yield_hg_ha),
            csv::format_double(rec.rainfall_mm),
            csv::format_double(rec.pesticides_tonnes),
            csv::format_double(rec.avg_temp_c)};
        out << csv::join_row(fields) << "\n";
    }
}

inline Dataset synth_dataset(const SynthConfig& cfg) {
    return encode(clean(synth_records(cfg)).records);
}

} // namespace cropml::test

#endif
