#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "cropml/csv.hpp"
#include "cropml/dataset.hpp"
#include "cropml/error.hpp"
#include "cropml/rng.hpp"
#include "support.hpp"

using namespace cropml;

namespace {

const char* kHeader =
    "Area,Item,Year,hg/ha_yield,average_rain_fall_mm_per_year,"
    "pesticides_tonnes,avg_temp\n";

std::vector<RawRecord> sample_records() {
    return {
        {"India", "Maize", 1995, 17000, 1000, 50, 25.0},
        {"Albania", "Maize", 1990, 36613, 1485, 121, 16.37},
        {"Albania", "Potatoes", 1991, 66667, 1485, 121, 15.36},
    };
}

} // namespace

TEST_CASE("load_csv maps fields from a data row") {
    test::TempDir dir("load");
    std::string path = dir.file("data.csv");
    test::write_text(path, std::string(kHeader) +
                               "Albania,Maize,1990,36613,1485,121,16.37\n");

    LoadResult result = load_csv(path);
    REQUIRE(result.records.size() == 1);
    const RawRecord& rec = result.records[0];
    CHECK(rec.area == "Albania");
    CHECK(rec.item == "Maize");
    CHECK(rec.year == 1990);
    CHECK(rec.yield_hg_ha == 36613.0);
    CHECK(rec.rainfall_mm == 1485.0);
    CHECK(rec.pesticides_tonnes == 121.0);
    CHECK(rec.avg_temp_c == 16.37);
    CHECK(result.diagnostics.empty());
}

TEST_CASE("load_csv reports non-numeric fields and excludes the row") {
    test::TempDir dir("load");
    std::string path = dir.file("data.csv");
    test::write_text(path, std::string(kHeader) +
                               "Albania,Maize,1990,36613,Asia,121,16.37\n"
                               "Albania,Maize,1991,30000,1485,121,16.37\n");

    LoadResult result = load_csv(path);
    CHECK(result.records.size() == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].row == 1);
    CHECK(result.diagnostics[0].field == "average_rain_fall_mm_per_year");
    CHECK(result.diagnostics[0].to_string() ==
          "row=1 field=average_rain_fall_mm_per_year "
          "reason=non-numeric average_rain_fall_mm_per_year");
}

TEST_CASE("load_csv rejects a header missing a required column") {
    test::TempDir dir("load");
    std::string path = dir.file("data.csv");
    test::write_text(path,
                     "Area,Item,Year,average_rain_fall_mm_per_year,"
                     "pesticides_tonnes,avg_temp\n"
                     "Albania,Maize,1990,1485,121,16.37\n");
    CHECK_THROWS_WITH_AS(load_csv(path),
                         "header missing required column(s): hg/ha_yield",
                         DataError);
}

TEST_CASE("load_csv handles reordered headers and extra columns") {
    test::TempDir dir("load");
    std::string path = dir.file("data.csv");
    test::write_text(path,
                     "Year,Area,Item,avg_temp,hg/ha_yield,"
                     "average_rain_fall_mm_per_year,pesticides_tonnes,notes\n"
                     "1990,Albania,Maize,16.37,36613,1485,121,hello\n");
    LoadResult result = load_csv(path);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].yield_hg_ha == 36613.0);
    CHECK(result.records[0].avg_temp_c == 16.37);
    REQUIRE(result.ignored_columns.size() == 1);
    CHECK(result.ignored_columns[0] == "notes");
}

TEST_CASE("load_csv errors on missing and empty files") {
    test::TempDir dir("load");
    CHECK_THROWS_AS(load_csv(dir.file("absent.csv")), DataError);
    std::string path = dir.file("empty.csv");
    test::write_text(path, "");
    CHECK_THROWS_AS(load_csv(path), DataError);
}

TEST_CASE("load_csv flags out-of-range years") {
    test::TempDir dir("load");
    std::string path = dir.file("data.csv");
    test::write_text(path, std::string(kHeader) +
                               "Albania,Maize,1776,36613,1485,121,16.37\n"
                               "Albania,Maize,1990,36613,1485,121,16.37\n");
    LoadResult result = load_csv(path);
    CHECK(result.records.size() == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].field == "Year");
}

TEST_CASE("clean retains valid records") {
    auto records = sample_records();
    CleanResult result = clean(records);
    CHECK(result.records.size() == 3);
    CHECK(result.dropped == 0);
}

TEST_CASE("clean drops non-finite and negative rows") {
    auto records = sample_records();
    records[1].avg_temp_c = std::numeric_limits<double>::quiet_NaN();
    CleanResult result = clean(records);
    CHECK(result.records.size() == 2);
    CHECK(result.dropped == 1);

    records[1].avg_temp_c = 10.0;
    records[0].yield_hg_ha = -5.0;
    result = clean(records);
    CHECK(result.records.size() == 2);
    CHECK(result.dropped == 1);
}

TEST_CASE("clean throws when everything is dropped") {
    auto records = sample_records();
    for (auto& rec : records)
        rec.rainfall_mm = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(clean(records), "empty dataset after cleaning",
                         DataError);
}

TEST_CASE("clean is idempotent") {
    auto records = sample_records();
    records[0].pesticides_tonnes = -1.0;
    CleanResult once = clean(records);
    CleanResult twice = clean(once.records);
    CHECK(twice.dropped == 0);
    CHECK(twice.records.size() == once.records.size());
}

TEST_CASE("encode assigns sorted ordinal codes") {
    Dataset ds = encode(sample_records());
    CHECK(ds.n_rows() == 3);
    CHECK(ds.n_features() == 6);
    // Albania sorts before India.
    CHECK(ds.area_map.code("Albania") == 0);
    CHECK(ds.area_map.code("India") == 1);
    CHECK(ds.X(0, 0) == 1.0);
    CHECK(ds.X(1, 0) == 0.0);
    CHECK(ds.item_map.code("Maize") == 0);
    CHECK(ds.item_map.code("Potatoes") == 1);
    CHECK(ds.feature_names[0] == "area_code");
    CHECK(ds.y[1] == 36613.0);
}

TEST_CASE("encode with a single distinct item zeroes the item column") {
    auto records = sample_records();
    for (auto& rec : records) rec.item = "Maize";
    Dataset ds = encode(records);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) CHECK(ds.X(r, 1) == 0.0);
}

TEST_CASE("encode round-trips every label") {
    Dataset ds = encode(sample_records());
    for (const auto& label : ds.area_map.categories())
        CHECK(ds.area_map.label(ds.area_map.code(label)) == label);
    for (const auto& label : ds.item_map.categories())
        CHECK(ds.item_map.label(ds.item_map.code(label)) == label);
}

TEST_CASE("split produces the requested partition sizes deterministically") {
    Matrix X(10, 6);
    for (std::size_t r = 0; r < 10; ++r) X(r, 2) = static_cast<double>(r);
    std::vector<double> y(10, 1.0);
    Dataset ds = test::make_dataset(X, y);

    SplitResult a = split(ds, 0.8, 42);
    CHECK(a.train.n_rows() == 8);
    CHECK(a.test.n_rows() == 2);

    SplitResult b = split(ds, 0.8, 42);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);
}

TEST_CASE("split differs between seeds") {
    Matrix X(100, 6);
    for (std::size_t r = 0; r < 100; ++r) X(r, 2) = static_cast<double>(r);
    Dataset ds = test::make_dataset(X, std::vector<double>(100, 1.0));
    SplitResult s1 = split(ds, 0.8, 1);
    SplitResult s2 = split(ds, 0.8, 2);
    CHECK(s1.train_indices != s2.train_indices);
}

TEST_CASE("split partitions the index set for random sizes and fractions") {
    rng::Xoshiro256ss gen(99);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 2 + gen.uniform(200);
        double fraction = 0.05 + 0.9 * gen.next_double();
        Matrix X(n, 6);
        for (std::size_t r = 0; r < n; ++r) X(r, 2) = static_cast<double>(r);
        Dataset ds = test::make_dataset(X, std::vector<double>(n, 1.0));

        SplitResult s;
        try {
            s = split(ds, fraction, gen.next());
        } catch (const UsageError&) {
            // tiny n with an extreme fraction can leave a side empty
            continue;
        }
        std::set<std::size_t> seen;
        seen.insert(s.train_indices.begin(), s.train_indices.end());
        seen.insert(s.test_indices.begin(), s.test_indices.end());
        CHECK(seen.size() == n);
        CHECK(s.train_indices.size() + s.test_indices.size() == n);
        CHECK(*seen.rbegin() == n - 1);
    }
}

TEST_CASE("split validates its inputs") {
    Matrix X(4, 6);
    Dataset ds = test::make_dataset(X, std::vector<double>(4, 1.0));
    CHECK_THROWS_AS(split(ds, 0.0, 1), UsageError);
    CHECK_THROWS_AS(split(ds, 1.0, 1), UsageError);
    CHECK_THROWS_AS(split(ds, 0.1, 1), UsageError); // empty train side
}

TEST_CASE("feature_column returns named columns and the target") {
    Dataset ds = encode(sample_records());
    auto year = feature_column(ds, "year");
    CHECK(year == std::vector<double>{1995, 1990, 1991});
    auto target = feature_column(ds, "yield");
    CHECK(target == ds.y);
    CHECK_THROWS_AS(feature_column(ds, "soil_ph"), UsageError);
}

TEST_CASE("write_csv then load_csv round-trips values exactly") {
    test::SynthConfig cfg;
    cfg.n_areas = 7;
    cfg.n_items = 4;
    cfg.year_max = 1995;
    Dataset ds = test::synth_dataset(cfg);

    test::TempDir dir("roundtrip");
    std::string path = dir.file("echo.csv");
    write_csv(ds, path);
    Dataset back = encode(clean(load_csv(path).records).records);

    REQUIRE(back.n_rows() == ds.n_rows());
    CHECK(back.X == ds.X);
    CHECK(back.y == ds.y);
    CHECK(back.area_map == ds.area_map);
    CHECK(back.item_map == ds.item_map);
}
