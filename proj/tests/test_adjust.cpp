#include <gtest/gtest.h>

#include <cmath>

#include "ritax/adjust.hpp"
#include "support.hpp"

using namespace ritax;

namespace {

const Economy kCase1(GoodSpec(0.60), GoodSpec(2.50, 0.55));
const Economy kCase2(GoodSpec(0.60), GoodSpec(4.00, 0.45));

void expect_adjusted(const AdjustedSolution& a, const Economy& econ, double R) {
    EXPECT_LT(std::abs(true_revenue(a.inner.taxes, econ) - R), 1e-8);
    EXPECT_LT(std::abs(perceived_revenue(a.inner.taxes, econ) - a.adjusted_target), 1e-8);
    EXPECT_LT(std::abs(foc_residual(a.inner.taxes, econ)), 1e-8);
    EXPECT_EQ(a.true_target, R);
}

} // namespace

TEST(Adjust, PerfectPerceptionLeavesTargetUnchanged) {
    const Economy econ(GoodSpec(0.6), GoodSpec(2.5));
    const auto a = adjust_budget(econ, RevenueTarget(0.3));
    EXPECT_EQ(a.adjusted_target, 0.3);
    const Solution s = solve_perceived(econ, RevenueTarget(0.3));
    EXPECT_EQ(a.inner.taxes, s.taxes);
    EXPECT_TRUE(a.alternatives.empty());
}

TEST(Adjust, Case1KeepsInverseRamseyOrdering) {
    const auto a = adjust_budget(kCase1, RevenueTarget(0.5));
    expect_adjusted(a, kCase1, 0.5);
    EXPECT_GT(a.inner.taxes.t2, a.inner.taxes.t1);
    EXPECT_GT(a.adjusted_target, 0.5);
    const Solution s = solve_perceived(kCase1, RevenueTarget(0.5));
    EXPECT_GT(a.inner.taxes.t2, s.taxes.t2);
}

TEST(Adjust, Case2RemovesSubsidy) {
    const auto a = adjust_budget(kCase2, RevenueTarget(0.2));
    expect_adjusted(a, kCase2, 0.2);
    EXPECT_GE(a.inner.taxes.t1, 0.0);
}

TEST(Adjust, IndependentFixedPoint) {
    // true revenue along the FOC locus, parametrised by t2 and inverted by bisection
    const auto a = adjust_budget(kCase1, RevenueTarget(0.5));
    const auto t1 = [](double t2) {
        const double g2 = std::pow(1 + t2, 2.5 - 1.375) * (1 - 1.375 * t2 / (1 + t2));
        const double s = (1 - g2) / 0.6;
        return s / (1 - s);
    };
    const auto tr = [&](double t2) {
        const double x1 = t1(t2);
        return x1 * ref::demand(x1, 0.6) + t2 * ref::demand(t2, 2.5) - 0.5;
    };
    const auto t2 = ref::bisect(tr, 0.0, 1.0);
    ASSERT_TRUE(t2);
    EXPECT_NEAR(a.inner.taxes.t2, *t2, 1e-9);
}

TEST(Adjust, TargetAboveTrueRequirementUnderMisperception) {
    for (double th : {0.55, 0.7, 0.9}) {
        const Economy econ(GoodSpec(0.6), GoodSpec(2.5, th));
        const auto a = adjust_budget(econ, RevenueTarget(0.3));
        EXPECT_GT(a.adjusted_target, 0.3);
        expect_adjusted(a, econ, 0.3);
    }
}

TEST(Adjust, ZeroTarget) {
    const auto a = adjust_budget(kCase1, RevenueTarget(0.0));
    EXPECT_EQ(a.adjusted_target, 0.0);
    EXPECT_NEAR(a.inner.taxes.t1, 0.0, 1e-12);
}

TEST(Adjust, InfeasibleWhenTrueRevenueCannotBeRaised) {
    // true revenue peaks at 0.398148 only where both goods sit at their
    // Laffer rates, which is off the misperceived first-order locus
    const Economy econ(GoodSpec(2.0), GoodSpec(3.0, 0.9));
    try {
        adjust_budget(econ, RevenueTarget(0.398));
        FAIL() << "expected Infeasible";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
    }
}
