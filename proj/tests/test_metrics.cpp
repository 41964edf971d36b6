#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rgs/metrics.hpp"
#include "rgs/rng.hpp"
#include "testutil.hpp"

using namespace rgs;

namespace {

ScoredSet random_fixture(Rng& rng, std::size_t max_cases, bool inject_ties) {
    ScoredSet s;
    const std::size_t n = 2 + rng.bounded(max_cases - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double score = rng.real01();
        if (inject_ties && rng.bounded(3) == 0)
            score = std::round(score * 4.0) / 4.0; // heavy tie mass
        s.scores.push_back(score);
        s.labels.push_back(static_cast<std::uint8_t>(rng.bounded(2)));
    }
    // force both classes
    s.labels[0] = 0;
    s.labels[n - 1] = 1;
    return s;
}

} // namespace

TEST_CASE("perfect ranking gives the three-point unit curve") {
    ScoredSet s{{0.9, 0.1}, {1, 0}};
    const RocCurve c = roc_curve(s);
    REQUIRE(c.fpr.size() == 3);
    CHECK(c.fpr[0] == 0.0);
    CHECK(c.tpr[0] == 0.0);
    CHECK(c.fpr[1] == 0.0);
    CHECK(c.tpr[1] == 1.0);
    CHECK(c.fpr[2] == 1.0);
    CHECK(c.tpr[2] == 1.0);
    CHECK(c.auc == doctest::Approx(1.0));
    CHECK(auc(s) == doctest::Approx(1.0));
}

TEST_CASE("all-equal scores collapse to one diagonal segment") {
    ScoredSet s{{0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 0}};
    const RocCurve c = roc_curve(s);
    REQUIRE(c.fpr.size() == 2); // (0,0) and (1,1)
    CHECK(c.auc == doctest::Approx(0.5));
    CHECK(auc(s) == doctest::Approx(0.5));
}

TEST_CASE("perfect anti-ranking scores zero") {
    ScoredSet s{{0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}};
    CHECK(auc(s) == doctest::Approx(0.0));
}

TEST_CASE("20-case tied fixture matches the pair-count oracle exactly") {
    Rng rng(7);
    ScoredSet s;
    for (int i = 0; i < 20; ++i) {
        s.scores.push_back(static_cast<double>(rng.bounded(5)) / 4.0);
        s.labels.push_back(static_cast<std::uint8_t>(rng.bounded(2)));
    }
    s.labels[0] = 1;
    s.labels[1] = 0;
    const double expect = testutil::pair_count_auc(s.scores, s.labels);
    CHECK(std::abs(auc(s) - expect) < 1e-12);
    CHECK(std::abs(roc_curve(s).auc - expect) < 1e-12);
}

TEST_CASE("random fixtures match the pair-count oracle to 1e-12") {
    Rng rng(2024);
    for (int rep = 0; rep < 300; ++rep) {
        const ScoredSet s = random_fixture(rng, 60, true);
        const double expect = testutil::pair_count_auc(s.scores, s.labels);
        CHECK(std::abs(auc(s) - expect) < 1e-12);
    }
}

TEST_CASE("reversal identity: auc(-scores) = 1 - auc(scores)") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const ScoredSet s = random_fixture(rng, 40, true);
        ScoredSet neg = s;
        for (auto& v : neg.scores) v = -v;
        CHECK(auc(neg) == doctest::Approx(1.0 - auc(s)).epsilon(1e-12));
    }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    Rng rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        const ScoredSet s = random_fixture(rng, 50, true);
        const double base = auc(s);
        ScoredSet t = s;
        for (auto& v : t.scores) v = std::exp(v);
        CHECK(auc(t) == doctest::Approx(base).epsilon(1e-12));
        t = s;
        for (auto& v : t.scores) v = 3.0 * v - 7.0;
        CHECK(auc(t) == doctest::Approx(base).epsilon(1e-12));
        t = s;
        for (auto& v : t.scores) v = v * v * v;
        CHECK(auc(t) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("every emitted curve satisfies the monotone endpoint invariants") {
    Rng rng(17);
    for (int rep = 0; rep < 50; ++rep) {
        const ScoredSet s = random_fixture(rng, 50, true);
        const RocCurve c = roc_curve(s);
        REQUIRE(c.fpr.size() >= 2);
        CHECK(c.fpr.front() == 0.0);
        CHECK(c.tpr.front() == 0.0);
        CHECK(c.fpr.back() == doctest::Approx(1.0));
        CHECK(c.tpr.back() == doctest::Approx(1.0));
        for (std::size_t i = 1; i < c.fpr.size(); ++i) {
            CHECK(c.fpr[i] >= c.fpr[i - 1]);
            CHECK(c.tpr[i] >= c.tpr[i - 1]);
        }
        for (std::size_t i = 1; i < c.thresholds.size(); ++i)
            CHECK(c.thresholds[i] < c.thresholds[i - 1]);
        CHECK(c.auc >= 0.0);
        CHECK(c.auc <= 1.0);
    }
}

TEST_CASE("single-class input is an error") {
    ScoredSet s{{0.1, 0.9}, {1, 1}};
    CHECK_THROWS_AS(auc(s), DataError);
    CHECK_THROWS_AS(roc_curve(s), DataError);
}

TEST_CASE("mean_test_auc") {
    const std::vector<double> same{0.8, 0.8, 0.8, 0.8, 0.8};
    CHECK(mean_test_auc(same, 5) == doctest::Approx(0.8));
    const std::vector<double> ladder{0.70, 0.75, 0.80, 0.85, 0.90};
    CHECK(mean_test_auc(ladder, 5) == doctest::Approx(0.80));
    const std::vector<double> four{0.7, 0.8, 0.9, 1.0};
    CHECK_THROWS_AS(mean_test_auc(four, 5), DataError);
}

TEST_CASE("percent_difference reproduces the published comparison arithmetic") {
    CHECK(std::abs(percent_difference(0.818, 0.862) - 5.38) < 0.01);
    CHECK(std::abs(percent_difference(0.766, 0.750) - -2.09) < 0.01);
    CHECK(std::abs(percent_difference(0.542, 0.766) - 41.3) < 0.1);
    CHECK_THROWS_AS(percent_difference(0.0, 0.5), DataError);
    CHECK_THROWS_AS(percent_difference(-1.0, 0.5), DataError);
}

TEST_CASE("roc csv round-trips") {
    ScoredSet s{{0.9, 0.7, 0.7, 0.2}, {1, 1, 0, 0}};
    const RocCurve c = roc_curve(s);
    const RocCurve back = RocCurve::from_csv(c.to_csv());
    REQUIRE(back.fpr.size() == c.fpr.size());
    for (std::size_t i = 0; i < c.fpr.size(); ++i) {
        CHECK(back.fpr[i] == c.fpr[i]);
        CHECK(back.tpr[i] == c.tpr[i]);
    }
    CHECK(back.auc == c.auc);
}
