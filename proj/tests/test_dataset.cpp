#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "rgs/dataset.hpp"
#include "rgs/rng.hpp"
#include "rgs/textio.hpp"
#include "testutil.hpp"

using namespace rgs;
namespace fs = std::filesystem;

namespace {

Schema two_column_schema() {
    return Schema({{"color", {"red", "green", "blue"}}, {"shape", {"circle", "square"}}},
                  "outcome");
}

std::string fixture_csv() {
    return "color,shape,outcome\n"
           "red,circle,no\n"
           "green,square,yes\n"
           "blue,circle,no\n"
           "red,square,yes\n";
}

} // namespace

TEST_CASE("loading a fixture reproduces the hand-enumerated index matrix") {
    const std::string dir = testutil::scratch_dir("load_fixture");
    write_file(dir + "/d.csv", fixture_csv());
    const Dataset d = load_dataset(dir + "/d.csv", two_column_schema());
    REQUIRE(d.n_cases() == 4);
    CHECK(d.n_positive() == 2);
    CHECK(d.n_negative() == 2);
    CHECK(d.row(0) == std::vector<std::uint8_t>{0, 0});
    CHECK(d.row(1) == std::vector<std::uint8_t>{1, 1});
    CHECK(d.row(2) == std::vector<std::uint8_t>{2, 0});
    CHECK(d.row(3) == std::vector<std::uint8_t>{0, 1});
    CHECK(d.outcome(0) == 0);
    CHECK(d.outcome(1) == 1);
}

TEST_CASE("header order does not matter") {
    const std::string dir = testutil::scratch_dir("load_reorder");
    write_file(dir + "/d.csv",
               "outcome,shape,color\nno,circle,red\nyes,square,green\n");
    const Dataset d = load_dataset(dir + "/d.csv", two_column_schema());
    CHECK(d.row(0) == std::vector<std::uint8_t>{0, 0});
    CHECK(d.row(1) == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("unknown token errors name the column and row") {
    const std::string dir = testutil::scratch_dir("load_badtoken");
    write_file(dir + "/d.csv", "color,shape,outcome\nred,circle,no\npurple,square,yes\n");
    try {
        load_dataset(dir + "/d.csv", two_column_schema());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("color") != std::string::npos);
        CHECK(msg.find("1") != std::string::npos);
        CHECK(msg.find("purple") != std::string::npos);
    }
}

TEST_CASE("missing column and empty file are rejected") {
    const std::string dir = testutil::scratch_dir("load_missing");
    write_file(dir + "/d.csv", "color,outcome\nred,no\n");
    CHECK_THROWS_AS(load_dataset(dir + "/d.csv", two_column_schema()), DataError);
    write_file(dir + "/empty.csv", "");
    CHECK_THROWS_AS(load_dataset(dir + "/empty.csv", two_column_schema()), DataError);
}

TEST_CASE("rfc 4180 quoting round-trips tokens with commas") {
    Schema schema({{"margin", {"res. tumor", "no res, tumor", "none"}}}, "outcome");
    const std::string dir = testutil::scratch_dir("load_quotes");
    write_file(dir + "/d.csv",
               "margin,outcome\n\"no res, tumor\",yes\n\"res. tumor\",no\n");
    const Dataset d = load_dataset(dir + "/d.csv", schema);
    CHECK(d.row(0)[0] == 1);
    CHECK(d.row(1)[0] == 0);

    d.save(dir + "/back.csv");
    const Dataset back = load_dataset(dir + "/back.csv", schema);
    CHECK(back.row(0)[0] == 1);
    CHECK(back.row(1)[0] == 0);
}

TEST_CASE("the shipped schema matches the published dataset shape") {
    const Schema schema = Schema::load(std::string(RGS_SOURCE_DIR) + "/data/lsm_schema.json");
    CHECK(schema.n_predictors() == 31);
    CHECK(schema.outcome_name() == "metastasis");
    const auto rf15 =
        load_feature_list(std::string(RGS_SOURCE_DIR) + "/data/rf_15year.txt");
    CHECK(rf15.size() == 17);
    const auto rf10 =
        load_feature_list(std::string(RGS_SOURCE_DIR) + "/data/rf_10year.txt");
    CHECK(rf10.size() == 18);
    const auto rf5 = load_feature_list(std::string(RGS_SOURCE_DIR) + "/data/rf_5year.txt");
    CHECK(rf5.size() == 20);
    for (const auto& name : rf15) CHECK(schema.has_predictor(name));
}

TEST_CASE("a file in the published 5-year shape loads with the published counts") {
    // synthesized rows, real schema: 4189 cases of which 437 positive
    const Schema schema = Schema::load(std::string(RGS_SOURCE_DIR) + "/data/lsm_schema.json");
    Rng rng(99);
    std::string csv;
    std::vector<std::string> header;
    for (const auto& col : schema.predictors()) header.push_back(col.name);
    header.push_back("metastasis");
    csv += csv_join(header) + "\n";
    for (std::size_t i = 0; i < 4189; ++i) {
        std::vector<std::string> row;
        for (const auto& col : schema.predictors())
            row.push_back(col.categories[rng.bounded(col.categories.size())]);
        row.push_back(i < 437 ? "yes" : "no");
        csv += csv_join(row) + "\n";
    }
    const std::string dir = testutil::scratch_dir("load_shape");
    write_file(dir + "/lsm.csv", csv);
    const Dataset d = load_dataset(dir + "/lsm.csv", schema);
    CHECK(d.n_cases() == 4189);
    CHECK(d.n_positive() == 437);
    CHECK(d.n_negative() == 3752);
    CHECK(d.n_predictors() == 31);
}

TEST_CASE("holdout splits per class with round-half-up") {
    // 751 cases, 608 positive / 143 negative: the published 15-year shape
    std::vector<std::vector<std::uint8_t>> rows(751, {0});
    std::vector<std::uint8_t> outs(751, 0);
    for (std::size_t i = 0; i < 608; ++i) outs[i] = 1;
    const Dataset d = testutil::tiny_dataset({{"x", {"a", "b"}}}, rows, outs);
    auto [train, valid] = stratified_holdout(d, 0.8, 5);
    CHECK(train.n_cases() == 600);
    CHECK(train.n_positive() == 486); // round-half-up(0.8 * 608)
    CHECK(train.n_negative() == 114); // round-half-up(0.8 * 143)
    CHECK(valid.n_cases() == 151);
}

TEST_CASE("holdout is exactly proportional when it divides evenly") {
    std::vector<std::vector<std::uint8_t>> rows(10, {0});
    std::vector<std::uint8_t> outs{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const Dataset d = testutil::tiny_dataset({{"x", {"a", "b"}}}, rows, outs);
    auto [train, valid] = stratified_holdout(d, 0.8, 7);
    CHECK(train.n_cases() == 8);
    CHECK(train.n_positive() == 4);
    CHECK(valid.n_cases() == 2);
    CHECK(valid.n_positive() == 1);
}

TEST_CASE("holdout is deterministic in the seed and partitions the input") {
    const Dataset d = testutil::make_synthetic({200, 4, 2, 0.4, 31});
    auto [t1, v1] = stratified_holdout(d, 0.8, 11);
    auto [t2, v2] = stratified_holdout(d, 0.8, 11);
    REQUIRE(t1.n_cases() == t2.n_cases());
    for (std::size_t i = 0; i < t1.n_cases(); ++i) CHECK(t1.row(i) == t2.row(i));
    CHECK(t1.n_cases() + v1.n_cases() == d.n_cases());
    CHECK(t1.n_positive() + v1.n_positive() == d.n_positive());
}

TEST_CASE("holdout rejects bad ratios and tiny classes") {
    const Dataset d = testutil::make_synthetic({50, 3, 1, 0.4, 3});
    CHECK_THROWS_AS(stratified_holdout(d, 0.0, 1), DataError);
    CHECK_THROWS_AS(stratified_holdout(d, 1.0, 1), DataError);
    std::vector<std::vector<std::uint8_t>> rows(5, {0});
    std::vector<std::uint8_t> outs{1, 0, 0, 0, 0};
    const Dataset tiny = testutil::tiny_dataset({{"x", {"a", "b"}}}, rows, outs);
    CHECK_THROWS_AS(stratified_holdout(tiny, 0.8, 1), DataError);
}

TEST_CASE("folds are exact when class counts divide k") {
    std::vector<std::vector<std::uint8_t>> rows(500, {0});
    std::vector<std::uint8_t> outs(500, 0);
    for (std::size_t i = 0; i < 100; ++i) outs[i] = 1;
    const Dataset d = testutil::tiny_dataset({{"x", {"a", "b"}}}, rows, outs);
    const FoldPlan plan = make_folds(d, 5, 3);
    for (std::size_t f = 0; f < 5; ++f) {
        std::size_t pos = 0, neg = 0;
        for (std::size_t i = 0; i < 500; ++i)
            if (plan.assignment[i] == f) (outs[i] ? pos : neg) += 1;
        CHECK(pos == 20);
        CHECK(neg == 80);
    }
}

TEST_CASE("fold remainders spread one per fold from fold 0") {
    // 437 = 5*87+2 and 3752 = 5*750+2: folds 0 and 1 take the extras
    std::vector<std::vector<std::uint8_t>> rows(4189, {0});
    std::vector<std::uint8_t> outs(4189, 0);
    for (std::size_t i = 0; i < 437; ++i) outs[i] = 1;
    const Dataset d = testutil::tiny_dataset({{"x", {"a", "b"}}}, rows, outs);
    const FoldPlan plan = make_folds(d, 5, 17);
    std::vector<std::size_t> pos(5, 0), neg(5, 0);
    for (std::size_t i = 0; i < 4189; ++i) (outs[i] ? pos : neg)[plan.assignment[i]] += 1;
    CHECK(pos == std::vector<std::size_t>{88, 88, 87, 87, 87});
    CHECK(neg == std::vector<std::size_t>{751, 751, 750, 750, 750});
}

TEST_CASE("fold count above a class count is an error") {
    std::vector<std::vector<std::uint8_t>> rows(30, {0});
    std::vector<std::uint8_t> outs(30, 0);
    for (std::size_t i = 0; i < 5; ++i) outs[i] = 1;
    const Dataset d = testutil::tiny_dataset({{"x", {"a", "b"}}}, rows, outs);
    CHECK_THROWS_AS(make_folds(d, 6, 1), DataError);
}

TEST_CASE("stratification and partition invariants hold across random seeds") {
    Rng seeds(321);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 40 + seeds.bounded(200);
        const auto d = testutil::make_synthetic({n, 3, 1, 0.3, seeds.next()});
        const std::size_t k = 2 + seeds.bounded(4);
        if (d.n_positive() < k || d.n_negative() < k) continue;
        const FoldPlan plan = make_folds(d, k, seeds.next());
        REQUIRE(plan.assignment.size() == d.n_cases());
        std::vector<std::size_t> pos(k, 0), neg(k, 0);
        for (std::size_t i = 0; i < d.n_cases(); ++i) {
            REQUIRE(plan.assignment[i] < k);
            (d.outcome(i) ? pos : neg)[plan.assignment[i]] += 1;
        }
        const double p_share = static_cast<double>(d.n_positive()) / static_cast<double>(k);
        const double n_share = static_cast<double>(d.n_negative()) / static_cast<double>(k);
        for (std::size_t f = 0; f < k; ++f) {
            CHECK(std::abs(static_cast<double>(pos[f]) - p_share) <= 1.0);
            CHECK(std::abs(static_cast<double>(neg[f]) - n_share) <= 1.0);
        }
    }
}

TEST_CASE("subset_features keeps schema order and rejects bad names") {
    const Dataset d = testutil::make_synthetic({30, 5, 2, 0.4, 8});
    SUBCASE("identity") {
        std::vector<std::string> all;
        for (const auto& col : d.schema().predictors()) all.push_back(col.name);
        const Dataset same = subset_features(d, all);
        CHECK(same.n_predictors() == d.n_predictors());
        for (std::size_t i = 0; i < d.n_cases(); ++i) CHECK(same.row(i) == d.row(i));
    }
    SUBCASE("subset keeps original column order even when keep is reversed") {
        const Dataset sub = subset_features(d, {"noise_3", "signal_0"});
        CHECK(sub.n_predictors() == 2);
        CHECK(sub.schema().predictors()[0].name == "signal_0");
        CHECK(sub.schema().predictors()[1].name == "noise_3");
        CHECK(sub.n_cases() == d.n_cases());
    }
    SUBCASE("unknown name") {
        CHECK_THROWS_AS(subset_features(d, {"nope"}), DataError);
    }
    SUBCASE("outcome is not removable") {
        CHECK_THROWS_AS(subset_features(d, {"outcome"}), DataError);
    }
    SUBCASE("empty list") {
        CHECK_THROWS_AS(subset_features(d, {}), DataError);
    }
}

TEST_CASE("one-hot encoding puts a single 1 per block") {
    Schema schema({{"a", {"x", "y", "z"}}, {"b", {"p", "q", "r", "s"}}}, "outcome");
    const Dataset d(schema, {{1, 3}, {0, 0}}, {1, 0});
    const EncodedMatrix m = encode(d, EncodeMode::OneHot);
    CHECK(m.width == 7); // 3 + 4
    CHECK(m.rows[0] == std::vector<double>{0, 1, 0, 0, 0, 0, 1});
    CHECK(m.rows[1] == std::vector<double>{1, 0, 0, 1, 0, 0, 0});
    CHECK(m.block_start == std::vector<std::size_t>{0, 3});
    CHECK(m.block_width == std::vector<std::size_t>{3, 4});
}

TEST_CASE("ordinal encoding is the identity on indices and decodes back") {
    const Dataset d = testutil::make_synthetic({40, 4, 2, 0.5, 77});
    const EncodedMatrix m = encode(d, EncodeMode::Ordinal);
    CHECK(m.width == 4);
    for (std::size_t i = 0; i < d.n_cases(); ++i)
        for (std::size_t c = 0; c < 4; ++c)
            CHECK(m.rows[i][c] == static_cast<double>(d.row(i)[c]));
    const Dataset back = decode_ordinal(d.schema(), m, d.outcomes());
    for (std::size_t i = 0; i < d.n_cases(); ++i) CHECK(back.row(i) == d.row(i));
}

TEST_CASE("schema json and fold plan files round-trip") {
    const std::string dir = testutil::scratch_dir("schema_roundtrip");
    const Schema schema = two_column_schema();
    schema.save(dir + "/schema.json");
    const Schema back = Schema::load(dir + "/schema.json");
    CHECK(back.n_predictors() == 2);
    CHECK(back.predictors()[0].categories == std::vector<std::string>{"red", "green", "blue"});

    const Dataset d = testutil::make_synthetic({60, 3, 1, 0.4, 5});
    const FoldPlan plan = make_folds(d, 4, 9);
    plan.save(dir + "/folds.csv");
    const FoldPlan plan_back = FoldPlan::load(dir + "/folds.csv");
    CHECK(plan_back.k == plan.k);
    CHECK(plan_back.assignment == plan.assignment);
}

TEST_CASE("schema invariants") {
    CHECK_THROWS_AS(Schema({{"a", {"x"}}}, "outcome"), DataError);      // < 2 categories
    CHECK_THROWS_AS(Schema({{"a", {"x", "y"}}, {"a", {"x", "y"}}}, "outcome"),
                    DataError);                                         // duplicate name
    CHECK_THROWS_AS(Schema({{"a", {"x", "x"}}}, "outcome"), DataError); // duplicate category
    CHECK_THROWS_AS(Schema({{"a", {"x", "y"}}}, "a"), DataError);       // outcome clash
}
