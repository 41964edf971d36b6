#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "rgs/rng.hpp"
#include "rgs/space.hpp"
#include "testutil.hpp"

using namespace rgs;

TEST_CASE("grid axis enumerates endpoints inclusively") {
    const Axis a = Axis::grid("rate", 0.0, 0.5, 0.1);
    const auto vals = a.values();
    REQUIRE(vals.size() == 6);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(vals[i].num == doctest::Approx(0.1 * static_cast<double>(i)));
}

TEST_CASE("explicit axis keeps its order") {
    const Axis a = Axis::explicit_values(
        "optimizer", {"SGD", "Adam", "Adagrad", "Nadam", "Adamax"});
    const auto vals = a.values();
    REQUIRE(vals.size() == 5);
    CHECK(vals[0].str == "SGD");
    CHECK(vals[4].str == "Adamax");
}

TEST_CASE("grid count survives floating-point division noise") {
    CHECK(Axis::grid("lr", 0.001, 0.101, 0.001).count() == 101);
    CHECK(Axis::grid("lr", 0.001, 0.3, 0.001).count() == 300);
    CHECK(Axis::grid("epochs", 5, 1001, 3).count() == 333);
    CHECK(Axis::grid("dropout", 0.0, 0.9, 0.01).count() == 91);
    CHECK(Axis::grid("momentum", 0.1, 0.9, 0.01).count() == 81);
    CHECK(Axis::grid("decay", 0.0, 0.3, 0.001).count() == 301);
    CHECK(Axis::grid("alpha", 0.00001, 100.0, 0.00001).count() == 10000000);
    // genuinely fractional ratio drops the part past the last whole step
    CHECK(Axis::grid("x", 0.0, 0.55, 0.1).count() == 6);
}

TEST_CASE("axis construction rejects bad shapes") {
    CHECK_THROWS_AS(Axis::grid("x", 0.0, 1.0, 0.0), DataError);
    CHECK_THROWS_AS(Axis::grid("x", 2.0, 1.0, 0.1), DataError);
    CHECK_THROWS_AS(Axis::explicit_values("x", {}), DataError);
    CHECK_THROWS_AS(Axis::explicit_values("x", {"a", "a"}), DataError);
    CHECK_THROWS_AS(Axis::int_range("x", 5, 4), DataError);
}

TEST_CASE("cardinality is the exact product of axis counts") {
    HyperparameterSpace tiny(MethodId::NB,
                             {Axis::explicit_values("a", {"x", "y", "z"}),
                              Axis::int_range("b", 1, 4)});
    CHECK(cardinality(tiny).str() == "12");
    HyperparameterSpace one(MethodId::NB, {Axis::explicit_values("a", {"x"})});
    CHECK(cardinality(one).str() == "1");
}

TEST_CASE("the DFNN pool for the 5-year shape is astronomically large, exactly") {
    const auto space = builtin_space(MethodId::DFNN, 4189);
    const auto counts = axis_counts(space);
    // epochs, batch, lr, dropout, momentum, decay, l1, l2, layers, nodes,
    // optimizer, initializer, input act, hidden act
    CHECK(counts == std::vector<std::size_t>{333, 4189, 300, 91, 81, 301, 301, 301, 4, 4189,
                                             5, 5, 4, 4});
    const BigUint pool = cardinality(space);
    CHECK(pool.digits() > 25); // far beyond any 64-bit accumulator
    CHECK(!pool.less_than(1000000));
    // spot check: product of the first two axes alone
    BigUint partial(333);
    partial.mul(4189);
    CHECK(partial.str() == "1394937");
}

TEST_CASE("sampling produces distinct settings deterministically") {
    const auto space = builtin_space(MethodId::NB, 100);
    const auto a = sample_hypes(space, 500, 77);
    const auto b = sample_hypes(space, 500, 77);
    REQUIRE(a.size() == 500);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].values == b[i].values);
        std::string key;
        for (const auto& [name, v] : a[i].values) key += name + "=" + v.repr() + ";";
        seen.insert(key);
    }
    CHECK(seen.size() == 500);
}

TEST_CASE("sampled values always belong to their axes") {
    for (MethodId m : {MethodId::NB, MethodId::DT, MethodId::SVC, MethodId::XGB,
                       MethodId::DFNN}) {
        const auto space = builtin_space(m, 64);
        for (const auto& h : sample_hypes(space, 40, 11)) {
            CHECK(h.method == m);
            validate_hypes(space, h); // throws on any violation
        }
    }
}

TEST_CASE("oversampling a small pool is an error") {
    HyperparameterSpace tiny(MethodId::NB,
                             {Axis::explicit_values("a", {"x", "y", "z"}),
                              Axis::int_range("b", 1, 4)});
    CHECK_THROWS_AS(sample_hypes(tiny, 13, 1), DataError);
    CHECK_NOTHROW(sample_hypes(tiny, 12, 1));
    CHECK_THROWS_AS(sample_hypes(tiny, 0, 1), DataError);
}

TEST_CASE("unrestricted axis draws pass a chi-square uniformity check") {
    // 0.999 quantiles: df=3 -> 16.266, df=4 -> 18.467
    const std::map<std::size_t, double> crit{{3, 16.266}, {4, 18.467}};
    const Axis axis = Axis::explicit_values("opt", {"SGD", "Adam", "Adagrad", "Nadam",
                                                    "Adamax"});
    Rng rng(12345);
    std::map<std::string, std::size_t> hits;
    const std::size_t draws = 10000;
    for (std::size_t i = 0; i < draws; ++i) hits[sample_axis_value(axis, rng).str] += 1;
    const double expected = static_cast<double>(draws) / 5.0;
    double chi2 = 0.0;
    for (const auto& [token, count] : hits) {
        (void)token;
        const double diff = static_cast<double>(count) - expected;
        chi2 += diff * diff / expected;
    }
    CHECK(hits.size() == 5);
    CHECK(chi2 < crit.at(4));
}

TEST_CASE("hypes accessors enforce presence and type") {
    const auto space = builtin_space(MethodId::DT, 50);
    const Hypes h = sample_hypes(space, 1, 5)[0];
    CHECK_NOTHROW(h.token("criterion"));
    CHECK_NOTHROW(h.integer("max_depth"));
    CHECK_THROWS_AS(h.num("criterion"), DataError);
    CHECK_THROWS_AS(h.token("max_depth"), DataError);
    CHECK_THROWS_AS(h.num("no_such_axis"), DataError);
}

TEST_CASE("space json files round-trip") {
    const std::string dir = testutil::scratch_dir("space_roundtrip");
    const auto space = builtin_space(MethodId::XGB, 123);
    space.save(dir + "/xgb.json");
    const auto back = HyperparameterSpace::load(dir + "/xgb.json");
    CHECK(back.method() == MethodId::XGB);
    REQUIRE(back.axes().size() == space.axes().size());
    for (std::size_t i = 0; i < space.axes().size(); ++i) {
        CHECK(back.axes()[i].name() == space.axes()[i].name());
        CHECK(back.axes()[i].count() == space.axes()[i].count());
    }
}

TEST_CASE("builtin spaces carry the published axes") {
    CHECK(builtin_space(MethodId::NB, 10).axes().size() == 3);
    CHECK(builtin_space(MethodId::ADB, 10).axes().size() == 3);
    CHECK(builtin_space(MethodId::DT, 10).axes().size() == 10);
    CHECK(builtin_space(MethodId::KNN, 10).axes().size() == 4);
    CHECK(builtin_space(MethodId::LASSO, 10).axes().size() == 5);
    CHECK(builtin_space(MethodId::LR, 10).axes().size() == 5);
    CHECK(builtin_space(MethodId::RaF, 10).axes().size() == 10);
    CHECK(builtin_space(MethodId::SVC, 10).axes().size() == 8);
    CHECK(builtin_space(MethodId::XGB, 10).axes().size() == 10);
    CHECK(builtin_space(MethodId::DFNN, 10).axes().size() == 14);

    // data-dependent bounds instantiate from the dataset size
    const auto dfnn = builtin_space(MethodId::DFNN, 4189);
    CHECK(dfnn.axis("batch_size").count() == 4189);
    CHECK(dfnn.axis("n_hidden_nodes").count() == 4189);
    const auto dt = builtin_space(MethodId::DT, 1000);
    CHECK(dt.axis("min_samples_split").count() == 999);  // 2..1000
    CHECK(dt.axis("min_samples_leaf").count() == 499);   // 2..500
}

TEST_CASE("method tokens parse with suggestions") {
    CHECK(parse_method("NB") == MethodId::NB);
    CHECK(parse_method("DFNN") == MethodId::DFNN);
    try {
        parse_method("SVM");
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("SVC") != std::string::npos);
    }
}

TEST_CASE("validate_hypes flags foreign and missing axes") {
    const auto space = builtin_space(MethodId::NB, 10);
    Hypes h = sample_hypes(space, 1, 3)[0];
    h.values.erase("alpha");
    CHECK_THROWS_AS(validate_hypes(space, h), DataError);
    Hypes h2 = sample_hypes(space, 1, 3)[0];
    h2.values.emplace("bogus", Value(1.0));
    CHECK_THROWS_AS(validate_hypes(space, h2), DataError);
    Hypes h3 = sample_hypes(space, 1, 3)[0];
    h3.values.at("alpha") = Value(-5.0);
    CHECK_THROWS_AS(validate_hypes(space, h3), DataError);
}
