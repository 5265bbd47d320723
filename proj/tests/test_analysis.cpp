#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ritax/analysis.hpp"

using namespace ritax;

namespace {

const Economy kCase1(GoodSpec(0.60), GoodSpec(2.50, 0.55));
const Economy kCase2(GoodSpec(0.60), GoodSpec(4.00, 0.45));

} // namespace

TEST(InverseRamsey, Case1Holds) {
    const Solution s = solve_perceived(kCase1, RevenueTarget(0.5));
    const auto r = inverse_ramsey_check(s, kCase1);
    EXPECT_TRUE(r.holds);
    EXPECT_TRUE(r.tax_ratio_check);
    EXPECT_GT(r.lhs, r.rhs);
    EXPECT_NEAR(r.burden_share, std::pow(1 + s.taxes.t2, -0.45 * 2.5), 1e-12);
    EXPECT_LT(r.burden_share, 1.0);
    EXPECT_NEAR(r.rhs, 1.375, 1e-15);
}

TEST(InverseRamsey, PerfectPerceptionFails) {
    const Economy econ(GoodSpec(0.6), GoodSpec(2.5));
    const Solution s = solve_perceived(econ, RevenueTarget(0.3));
    const auto r = inverse_ramsey_check(s, econ);
    EXPECT_FALSE(r.holds);
    EXPECT_FALSE(r.tax_ratio_check);
    EXPECT_DOUBLE_EQ(r.burden_share, 1.0);
}

TEST(InverseRamsey, UnitPerceivedElasticityKeepsMultiplierAtOne) {
    // theta2 e2 = e1 = 1: the first-order condition pins t1 = 0 and mu = 1
    const Economy econ(GoodSpec(1.0), GoodSpec(2.0, 0.5));
    const Solution s = solve_perceived(econ, RevenueTarget(0.2));
    EXPECT_NEAR(s.taxes.t1, 0.0, 1e-12);
    EXPECT_NEAR(s.mu, 1.0, 1e-12);
    EXPECT_THROW(inverse_ramsey_check(s, econ), Error);
}

TEST(InverseRamsey, MisperceivedTaxedGoodHoldsStrictly) {
    const Economy econ(GoodSpec(1.0), GoodSpec(2.0, 0.6));
    const Solution s = solve_perceived(econ, RevenueTarget(0.2));
    const auto r = inverse_ramsey_check(s, econ);
    EXPECT_LT(r.burden_share, 1.0);
    EXPECT_TRUE(r.holds);
    EXPECT_TRUE(r.tax_ratio_check);
}

TEST(InverseRamsey, DegenerateAtZeroRevenue) {
    const Solution s = solve_perceived(kCase1, RevenueTarget(0.0));
    try {
        inverse_ramsey_check(s, kCase1);
        FAIL() << "expected DegenerateMultiplier";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateMultiplier);
    }
}

TEST(InverseRamsey, ConditionMatchesTaxRatioWhenMuAboveOne) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ue(0.2, 4.0), uth(0.5, 1.0), ur(0.02, 0.3);
    int checked = 0;
    for (int k = 0; k < 60; ++k) {
        const Economy econ(GoodSpec(ue(rng)), GoodSpec(ue(rng), uth(rng)));
        try {
            const Solution s = solve_perceived(econ, RevenueTarget(ur(rng)));
            if (s.mu <= 1.0)
                continue;
            const auto r = inverse_ramsey_check(s, econ);
            EXPECT_EQ(r.holds, r.tax_ratio_check);
            ++checked;
        } catch (const Error&) {
        }
    }
    EXPECT_GT(checked, 20);
}

TEST(SmallR, Predicate) {
    EXPECT_TRUE(small_r_approx_check(Economy(GoodSpec(0.6), GoodSpec(2.5, 0.55))));
    EXPECT_FALSE(small_r_approx_check(Economy(GoodSpec(0.6), GoodSpec(2.5))));
    // boundary theta e_i = (e_i + e_j) / 2 is not strict
    EXPECT_FALSE(small_r_approx_check(Economy(GoodSpec(0.5), GoodSpec(2.0, 0.625))));
    EXPECT_THROW(small_r_approx_check(Economy(GoodSpec(0.6, 0.9), GoodSpec(2.5, 0.55))), Error);
}

TEST(SmallR, AgreesWithSolvedOutcome) {
    const RevenueTarget r(1e-3);
    for (double th : {0.40, 0.50, 0.58, 0.66, 0.75, 0.9}) {
        const Economy econ(GoodSpec(0.6), GoodSpec(2.5, th));
        EXPECT_EQ(small_r_approx_check(econ), perceived_inverse_ramsey(econ, r)) << th;
    }
}

TEST(Existence, ThresholdInsideInterval) {
    const double th = existence_threshold(2.5, 0.6, RevenueTarget(0.1));
    EXPECT_GT(th, 0.24);
    EXPECT_LT(th, 1.0);
    const Economy base(GoodSpec(0.6), GoodSpec(2.5));
    EXPECT_TRUE(perceived_inverse_ramsey(base.with_theta2(th * 0.99), RevenueTarget(0.1)));
    EXPECT_FALSE(perceived_inverse_ramsey(base.with_theta2(std::min(1.0, th * 1.01)), RevenueTarget(0.1)));
}

TEST(Existence, OutcomeMonotoneInTheta) {
    const Economy base(GoodSpec(0.6), GoodSpec(2.5));
    bool seen_false = false;
    for (int k = 0; k < 50; ++k) {
        const double th = 0.25 + 0.75 * k / 49.0;
        const bool holds = perceived_inverse_ramsey(base.with_theta2(th), RevenueTarget(0.1));
        if (!holds)
            seen_false = true;
        else
            EXPECT_FALSE(seen_false) << "outcome flips back at theta " << th;
    }
    EXPECT_TRUE(seen_false);
}

TEST(Existence, RejectsBadElasticities) {
    EXPECT_THROW(existence_threshold(0.6, 2.5, RevenueTarget(0.1)), Error);
}

TEST(Existence, EqualPerceivedElasticitiesGiveInverseRamsey) {
    const double th = 0.6 / 2.5;
    const Economy econ(GoodSpec(0.6), GoodSpec(2.5, th * (1 + 1e-9)));
    EXPECT_TRUE(perceived_inverse_ramsey(econ, RevenueTarget(0.05)));
}

TEST(Mu, UnitAtZero) {
    EXPECT_DOUBLE_EQ(mu_of_r(kCase1, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(mu_of_r(kCase2, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(mu_of_r(kCase1, 0.0, MuPathKind::Adjusted), 1.0);
}

TEST(Mu, AboveOneWithoutMisperception) {
    const Economy econ(GoodSpec(0.6), GoodSpec(2.5));
    for (double r : {0.01, 0.1, 0.3})
        EXPECT_GT(mu_of_r(econ, r), 1.0);
}

TEST(Mu, BelowOneWithSubsidy) {
    const MuPath mu(kCase2);
    const Solution s = mu.solution(0.2);
    EXPECT_LT(s.taxes.t1, 0.0);
    EXPECT_LT(s.mu, 1.0);
}

TEST(Mu, ContinuousNearZero) {
    const MuPath mu(kCase1);
    EXPECT_NEAR(mu(1e-7), 1.0, 1e-5);
    double prev = mu(0.0);
    for (int k = 1; k <= 50; ++k) {
        const double v = mu(0.5 * k / 50);
        EXPECT_LT(std::abs(v - prev), 0.05);
        prev = v;
    }
}

TEST(Mu, AdjustedPathUsesAdjustedSolution) {
    const MuPath mu(kCase1, MuPathKind::Adjusted);
    const auto a = adjust_budget(kCase1, RevenueTarget(0.3));
    EXPECT_DOUBLE_EQ(mu(0.3), a.inner.mu);
}

TEST(LumpSum, ExcessBurdenWithoutMisperception) {
    const Economy econ(GoodSpec(0.6), GoodSpec(2.5));
    for (double R : {0.1, 0.3}) {
        const auto rep = lumpsum_compare(econ, RevenueTarget(R));
        EXPECT_TRUE(rep.complete);
        EXPECT_GT(rep.integral, R);
        EXPECT_FALSE(rep.commodity_preferred);
    }
}

TEST(LumpSum, IntegralEqualsWelfareLoss) {
    // envelope theorem: d W / d r = -mu along the path
    for (const Economy* e : {&kCase1, &kCase2}) {
        const double R = 0.2;
        const auto rep = lumpsum_compare(*e, RevenueTarget(R));
        const Solution s = MuPath(*e).solution(R);
        EXPECT_NEAR(rep.integral, -s.welfare, 1e-6);
    }
}

TEST(LumpSum, AperitivoRegionPrefersLumpSum) {
    const auto rep = lumpsum_compare(kCase1, RevenueTarget(0.5));
    EXPECT_TRUE(rep.aperitivo_monotone);
    EXPECT_FALSE(rep.commodity_preferred);
    EXPECT_GT(rep.integral, 0.5);
}

TEST(LumpSum, SevereMisperceptionPrefersCommodityTax) {
    const auto rep = lumpsum_compare(kCase2, RevenueTarget(0.2));
    EXPECT_TRUE(rep.complete);
    EXPECT_LT(rep.integral, 0.2);
    EXPECT_TRUE(rep.commodity_preferred);
    EXPECT_FALSE(rep.aperitivo_monotone);
}

TEST(LumpSum, PartialIntegralPastFold) {
    const Economy econ(GoodSpec(0.6), GoodSpec(2.5, 0.8));
    const MuPath mu(econ);
    const double R = mu.limit() * 1.5;
    const auto rep = lumpsum_compare(econ, RevenueTarget(R));
    EXPECT_FALSE(rep.complete);
    EXPECT_FALSE(rep.commodity_preferred);
    EXPECT_NEAR(rep.integrated_to, mu.limit(), 1e-12);
    EXPECT_GT(rep.integral, 0.0);
}

TEST(Aperitivo, SignRegions) {
    EXPECT_TRUE(aperitivo_monotone(Economy(GoodSpec(1.0), GoodSpec(2.5, 0.55))));
    EXPECT_TRUE(aperitivo_monotone(Economy(GoodSpec(1.0), GoodSpec(2.5, 1.0))));
    EXPECT_FALSE(aperitivo_monotone(Economy(GoodSpec(1.0), GoodSpec(4.0, 0.45))));
}
