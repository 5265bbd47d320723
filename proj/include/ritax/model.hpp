#pragma once

// Two-good quasilinear economy with constant-elasticity demand
// x_i = (1 + t_i)^(-e_i) and a planner who perceives the elasticity of
// good i as theta_i * e_i.

#include <cmath>
#include <string>
#include <string_view>

#include "ritax/errors.hpp"
#include "ritax/types.hpp"

namespace ritax {

inline void require_tax(double t, const char* what = "tax rate") {
    if (!(t > -1.0) || !std::isfinite(t))
        fail(ErrorKind::Domain, std::string(what) + " must be finite and > -1, got " + std::to_string(t));
}

/// One good: true own-price elasticity and misperception factor.
class GoodSpec {
public:
    explicit GoodSpec(double e, double theta = 1.0) : e_(e), theta_(theta) {
        if (!(e > 0.0) || !std::isfinite(e))
            fail(ErrorKind::Domain, "elasticity must be positive, got " + std::to_string(e));
        if (!(theta > 0.0 && theta <= 1.0))
            fail(ErrorKind::Domain, "theta must lie in (0, 1], got " + std::to_string(theta));
    }

    double e() const noexcept { return e_; }
    double theta() const noexcept { return theta_; }
    /// theta * e, the perceived elasticity on the misperceived domain.
    double perceived_e() const noexcept { return theta_ * e_; }
    bool misperceived() const noexcept { return theta_ < 1.0; }

    friend bool operator==(const GoodSpec&, const GoodSpec&) = default;

private:
    double e_;
    double theta_;
};

/// Where misperception applies. TaxedOnly: only for t > 0. Symmetric: for
/// every t, subsidies included.
enum class PerceptionMode { TaxedOnly, Symmetric };

constexpr std::string_view to_string(PerceptionMode m) noexcept {
    return m == PerceptionMode::TaxedOnly ? "taxed_only" : "symmetric";
}

class Economy {
public:
    Economy(GoodSpec good1, GoodSpec good2, PerceptionMode mode = PerceptionMode::TaxedOnly)
        : good1_(good1), good2_(good2), mode_(mode) {}

    const GoodSpec& good1() const noexcept { return good1_; }
    const GoodSpec& good2() const noexcept { return good2_; }
    const GoodSpec& good(int i) const noexcept { return i == 1 ? good1_ : good2_; }
    PerceptionMode mode() const noexcept { return mode_; }

    /// Same elasticities, perfect perception of both goods.
    Economy without_misperception() const {
        return {GoodSpec(good1_.e()), GoodSpec(good2_.e()), mode_};
    }

    Economy with_theta2(double theta2) const {
        return {good1_, GoodSpec(good2_.e(), theta2), mode_};
    }

    /// Index (1 or 2) of the more elastic good; ties go to good 2.
    int more_elastic_good() const noexcept { return good1_.e() > good2_.e() ? 1 : 2; }

    friend bool operator==(const Economy&, const Economy&) = default;

private:
    GoodSpec good1_;
    GoodSpec good2_;
    PerceptionMode mode_;
};

class RevenueTarget {
public:
    explicit RevenueTarget(double r) : r_(r) {
        if (!(r >= 0.0) || !std::isfinite(r))
            fail(ErrorKind::Domain, "revenue target must be finite and >= 0, got " + std::to_string(r));
    }
    double value() const noexcept { return r_; }

private:
    double r_;
};

/// Misperception factor in force at tax rate t.
inline double effective_theta(double t, const GoodSpec& g, PerceptionMode mode) noexcept {
    if (mode == PerceptionMode::Symmetric || t > 0.0)
        return g.theta();
    return 1.0;
}

inline double perceived_elasticity(double t, const GoodSpec& g, PerceptionMode mode) noexcept {
    return effective_theta(t, g, mode) * g.e();
}

inline double true_demand(double t, const GoodSpec& g) {
    require_tax(t);
    return std::exp(-g.e() * std::log1p(t));
}

inline double perceived_demand(double t, const GoodSpec& g, PerceptionMode mode) {
    require_tax(t);
    return std::exp(-perceived_elasticity(t, g, mode) * std::log1p(t));
}

namespace detail {

// Unchecked kernels for hot loops; callers guarantee t > -1.
inline double revenue_term(double t, double elasticity) noexcept {
    return t * std::exp(-elasticity * std::log1p(t));
}

inline double perceived_revenue_term(double t, const GoodSpec& g, PerceptionMode mode) noexcept {
    return revenue_term(t, perceived_elasticity(t, g, mode));
}

// -((1+t)^(1-e) - 1) / (1-e), normalised so the term vanishes at t = 0;
// the e = 1 limit is -log(1+t).
inline double welfare_term(double t, double e) noexcept {
    const double lq = std::log1p(t);
    const double a = (1.0 - e) * lq;
    if (std::abs(a) < 1e-12)
        return -lq * (1.0 + 0.5 * a);
    return -lq * (std::expm1(a) / a);
}

} // namespace detail

inline double perceived_revenue(TaxPair tp, const Economy& econ) {
    require_tax(tp.t1, "t1");
    require_tax(tp.t2, "t2");
    return detail::perceived_revenue_term(tp.t1, econ.good1(), econ.mode()) +
           detail::perceived_revenue_term(tp.t2, econ.good2(), econ.mode());
}

inline double true_revenue(TaxPair tp, const Economy& econ) {
    require_tax(tp.t1, "t1");
    require_tax(tp.t2, "t2");
    return detail::revenue_term(tp.t1, econ.good1().e()) + detail::revenue_term(tp.t2, econ.good2().e());
}

/// Indirect-utility objective of the representative consumer, up to an
/// additive constant chosen so that welfare(0, 0) = 0. Its partial
/// derivative in t_i is -true_demand(t_i).
inline double welfare(TaxPair tp, const Economy& econ) {
    require_tax(tp.t1, "t1");
    require_tax(tp.t2, "t2");
    return detail::welfare_term(tp.t1, econ.good1().e()) + detail::welfare_term(tp.t2, econ.good2().e());
}

} // namespace ritax
