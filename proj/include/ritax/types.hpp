#pragma once

#include <cmath>

namespace ritax {

/// Search domain for tax rates. The lower end is exclusive in the model
/// (prices must stay positive) but every search clamps to these values.
inline constexpr double kTaxMin = -0.99;
inline constexpr double kTaxMax = 100.0;

/// A point (t1, t2) in tax-rate space. Consumer price is q_i = 1 + t_i.
struct TaxPair {
    double t1 = 0.0;
    double t2 = 0.0;

    friend bool operator==(const TaxPair&, const TaxPair&) = default;
};

inline double distance(TaxPair a, TaxPair b) noexcept {
    return std::hypot(a.t1 - b.t1, a.t2 - b.t2);
}

/// Axis-aligned rectangle in tax-rate space, bounds inclusive.
struct Box {
    double t1_min = kTaxMin;
    double t1_max = kTaxMax;
    double t2_min = kTaxMin;
    double t2_max = kTaxMax;

    bool contains(TaxPair p) const noexcept {
        return p.t1 >= t1_min && p.t1 <= t1_max && p.t2 >= t2_min && p.t2 <= t2_max;
    }
};

/// t / (1 + t): the tax-inclusive share of the consumer price.
inline double tax_share(double t) noexcept { return t / (1.0 + t); }

} // namespace ritax
