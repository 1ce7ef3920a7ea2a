#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ed/ensemble_core.hpp"
#include "oracles.hpp"

using namespace ed;

TEST(Quantile, MinRuleExamples) {
    EXPECT_EQ(empirical_quantile(std::vector{1.0, 2.0, 3.0, 4.0}, 0.5), 2.0);
    EXPECT_EQ(empirical_quantile(std::vector{5.0}, 0.25), 5.0);
    EXPECT_EQ(empirical_quantile(std::vector{3.0, 1.0, 2.0}, 0.75), 3.0);
}

TEST(Quantile, ZeroIsMinimumAndOneIsMaximum) {
    const std::vector e{4.0, -2.0, 7.5, 0.0};
    EXPECT_EQ(empirical_quantile(e, 0.0), -2.0);
    EXPECT_EQ(empirical_quantile(e, 1.0), 7.5);
}

TEST(Quantile, EmptyAndBadProbabilityRejected) {
    EXPECT_THROW(empirical_quantile(std::vector<double>{}, 0.5), Error);
    EXPECT_THROW(empirical_quantile(std::vector{1.0}, 1.5), Error);
    try {
        empirical_quantile(std::vector<double>{}, 0.5);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(Quantile, AgreesWithEnumerationOracle) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> len(1, 12), val(0, 6);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> e(len(rng));
        for (auto& x : e) x = val(rng);
        double p = prob(rng);
        if (t % 3 == 0) p = static_cast<double>(val(rng) % 5) / 4.0;  // exact grid points
        ASSERT_EQ(empirical_quantile(e, p), oracle::quantile(e, p)) << "p=" << p;
    }
}

TEST(Quantile, MonotoneInP) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> e(1 + t % 17);
        for (auto& x : e) x = z(rng);
        double prev = -INFINITY;
        for (int k = 0; k <= 100; ++k) {
            const double q = empirical_quantile(e, k / 100.0);
            ASSERT_LE(prev, q);
            prev = q;
        }
    }
}

TEST(Quantile, EquivariantUnderLog) {
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> ln;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> e(1 + t % 13), le;
        for (auto& x : e) x = ln(rng);
        for (double x : e) le.push_back(std::log(x));
        for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
            ASSERT_EQ(std::log(empirical_quantile(e, p)), empirical_quantile(le, p));
        }
    }
}

TEST(Ranks, Examples) {
    const auto r = ranks(std::vector{3.0, 1.0, 2.0});
    EXPECT_EQ(r.ranks, (std::vector<int>{3, 1, 2}));
    EXPECT_EQ(r.percentiles, (std::vector<double>{0.75, 0.25, 0.5}));
    EXPECT_EQ(ranks(std::vector{2.0, 2.0}).ranks, (std::vector<int>{2, 2}));
    const auto one = ranks(std::vector{10.0});
    EXPECT_EQ(one.ranks, (std::vector<int>{1}));
    EXPECT_EQ(one.percentiles, (std::vector<double>{0.5}));
}

TEST(Ranks, IndicatorSumOracleAndPercentileIdentity) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> val(0, 4);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> e(1 + t % 11);
        for (auto& x : e) x = val(rng);
        const auto r = ranks(e);
        ASSERT_EQ(r.ranks, oracle::ranks(e));
        for (std::size_t i = 0; i < e.size(); ++i) {
            ASSERT_EQ(r.percentiles[i], static_cast<double>(r.ranks[i]) / (e.size() + 1.0));
            ASSERT_GE(r.ranks[i], 1);
            ASSERT_LE(r.ranks[i], static_cast<int>(e.size()));
        }
    }
}

TEST(Ranks, SortingValuesSortsRanks) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::vector<double> e(40);
    for (auto& x : e) x = z(rng);
    const auto r = ranks(e);
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = 0; j < e.size(); ++j)
            if (e[i] < e[j]) ASSERT_LT(r.ranks[i], r.ranks[j]);
}

TEST(Ranks, PermutationBreaksTiesByKeyThenIndex) {
    const std::vector e{1.0, 1.0, 0.0, 1.0};
    EXPECT_EQ(rank_permutation(e).ranks, (std::vector<int>{2, 3, 1, 4}));
    const std::vector key{5.0, 1.0, 0.0, 1.0};
    EXPECT_EQ(rank_permutation(e, key).ranks, (std::vector<int>{4, 2, 1, 3}));
}

TEST(QuartileFunctionals, Examples) {
    const std::vector a{1.0, 2.0, 3.0, 4.0};
    EXPECT_EQ(empirical_qr(a), 3.0);
    EXPECT_EQ(empirical_iqr(a), 2.0);
    const std::vector b{2.0, 2.0, 2.0};
    EXPECT_EQ(empirical_qr(b), 1.0);
    EXPECT_EQ(empirical_iqr(b), 0.0);
    const std::vector c{-1.0, 0.0, 1.0, 2.0};
    EXPECT_EQ(empirical_iqr(c), 2.0);
    try {
        (void)empirical_qr(c);
        FAIL() << "sign-mixed QR accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(QuartileFunctionals, QrIsExpOfLogIqr) {
    std::mt19937_64 rng(6);
    std::lognormal_distribution<double> ln;
    for (int t = 0; t < 300; ++t) {
        std::vector<double> e(1 + t % 19), le;
        for (auto& x : e) x = ln(rng);
        for (double x : e) le.push_back(std::log(x));
        ASSERT_NEAR(empirical_qr(e), std::exp(empirical_iqr(le)), 1e-12 * empirical_qr(e));
    }
}

TEST(DrawMatrix, ValidatesShapeValuesAndIds) {
    EXPECT_THROW(PosteriorDrawMatrix(0, 1, {}), Error);
    EXPECT_THROW(PosteriorDrawMatrix(1, 2, {1.0}), Error);
    EXPECT_THROW(PosteriorDrawMatrix(1, 1, {NAN}), Error);
    EXPECT_THROW(PosteriorDrawMatrix(1, 2, {1.0, 2.0}, {"a", "a"}), Error);
    const PosteriorDrawMatrix m(2, 2, {1, 2, 3, 4});
    EXPECT_EQ(m.unit_ids(), (std::vector<std::string>{"u1", "u2"}));
    EXPECT_EQ(m(1, 0), 3.0);
    EXPECT_EQ(m.column(1), (std::vector<double>{2, 4}));
}

TEST(PerDrawMap, Examples) {
    const PosteriorDrawMatrix m(2, 2, {1, 2, 3, 4});
    EXPECT_EQ(per_draw_map(m, [](auto r) { return mean(r); }), (std::vector<double>{1.5, 3.5}));
    const PosteriorDrawMatrix one(1, 3, {9, 7, 8});
    EXPECT_EQ(per_draw_map(one, [](auto r) { return empirical_quantile(r, 0.5); }),
              (std::vector<double>{8}));
}

TEST(PerDrawMap, QrMatchesRowLoopOracle) {
    std::mt19937_64 rng(7);
    const auto m = oracle::random_positive_matrix(rng, 30, 9);
    const auto got = per_draw_map(m, [](auto r) { return empirical_qr(r); });
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto r = oracle::row(m, s);
        ASSERT_EQ(got[s], oracle::quantile(r, 0.75) / oracle::quantile(r, 0.25));
    }
}

TEST(PerDrawMap, ErrorsCarryDrawIndex) {
    const PosteriorDrawMatrix m(2, 4, {1, 2, 3, 4, -1, 0, 1, 2});
    try {
        per_draw_map(m, [](auto r) { return empirical_qr(r); });
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
        EXPECT_NE(std::string(e.what()).find("draw 1"), std::string::npos);
    }
}
