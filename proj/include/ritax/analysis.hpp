#pragma once

// Inverse-Ramsey diagnostics, small-R approximation and threshold search,
// and the lump-sum comparison of the integrated multiplier.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ritax/adjust.hpp"
#include "ritax/errors.hpp"
#include "ritax/model.hpp"
#include "ritax/quadrature.hpp"
#include "ritax/roots.hpp"
#include "ritax/solver.hpp"

namespace ritax {

struct InverseRamseyReport {
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double mu = 1.0;
    double burden_share = 1.0; // x_i* / xbar_i for the more elastic good i
    bool tax_ratio_check = false;
};

/// Multiplier condition for the more elastic good i against good j,
///   (1 - rho_i / mu) / (1 - rho_j / mu) * ebar_j  >  ebar_i,
/// with rho = x* / xbar, next to the direct comparison of t / (1 + t).
inline InverseRamseyReport inverse_ramsey_check(const Solution& sol, const Economy& econ) {
    if (std::abs(sol.mu - 1.0) < 1e-9)
        fail(ErrorKind::DegenerateMultiplier, "multiplier is 1; the inverse-Ramsey condition is undefined");
    const int i = econ.more_elastic_good();
    const int j = 3 - i;
    const double ti = i == 1 ? sol.taxes.t1 : sol.taxes.t2;
    const double tj = i == 1 ? sol.taxes.t2 : sol.taxes.t1;
    const GoodSpec& gi = econ.good(i);
    const GoodSpec& gj = econ.good(j);
    const double ebar_i = perceived_elasticity(ti, gi, econ.mode());
    const double ebar_j = perceived_elasticity(tj, gj, econ.mode());
    const double rho_i = true_demand(ti, gi) / perceived_demand(ti, gi, econ.mode());
    const double rho_j = true_demand(tj, gj) / perceived_demand(tj, gj, econ.mode());

    InverseRamseyReport rep;
    rep.mu = sol.mu;
    rep.burden_share = rho_i;
    rep.lhs = (1.0 - rho_i / sol.mu) / (1.0 - rho_j / sol.mu) * ebar_j;
    rep.rhs = ebar_i;
    rep.holds = rep.lhs > rep.rhs;
    rep.tax_ratio_check = tax_share(ti) > tax_share(tj);
    return rep;
}

/// Small-revenue predicate: inverse-Ramsey iff (e_i + e_j) / 2 > theta_i e_i,
/// with i = good 2 (the misperceived good) and j = good 1.
inline bool small_r_approx_check(const Economy& econ) {
    if (econ.good1().theta() != 1.0)
        fail(ErrorKind::Unsupported, "small-R predicate requires good 1 to be perfectly perceived");
    const double ei = econ.good2().e(), ej = econ.good1().e();
    return 0.5 * (ei + ej) > econ.good2().perceived_e();
}

/// Tax-ratio outcome t2/(1+t2) > t1/(1+t1) of the perceived optimum,
/// including optima on the edge of the tax domain.
inline bool perceived_inverse_ramsey(const Economy& econ, RevenueTarget r) {
    try {
        const Solution s = solve_perceived(econ, r);
        return tax_share(s.taxes.t2) > tax_share(s.taxes.t1);
    } catch (const CornerSolutionError& c) {
        return tax_share(c.best().t2) > tax_share(c.best().t1);
    } catch (const InfeasibleError&) {
        return false;
    }
}

struct ThresholdOptions {
    int scan_points = 64;
    double theta_tol = 1e-10;
};

/// Largest misperception factor theta for good i (elasticity e_i, perceived
/// elasticity theta e_i on taxed units) at which the planner still taxes i
/// proportionally more than the perfectly perceived good j.
inline double existence_threshold(double e_i, double e_j, RevenueTarget r, const ThresholdOptions& opt = {}) {
    if (!(e_i > e_j && e_j > 0.0))
        fail(ErrorKind::Domain, "existence_threshold needs e_i > e_j > 0");
    const double lo = e_j / e_i;
    const Economy base(GoodSpec(e_j), GoodSpec(e_i), PerceptionMode::TaxedOnly);
    const auto holds = [&](double th) { return perceived_inverse_ramsey(base.with_theta2(th), r); };

    // open interval (lo, 1)
    const int n = opt.scan_points;
    std::vector<double> th(static_cast<std::size_t>(n));
    std::vector<char> ok(th.size());
    for (int k = 0; k < n; ++k) {
        th[k] = lo + (1.0 - lo) * (k + 1.0) / (n + 1.0);
        ok[k] = holds(th[k]);
    }
    int last = -1;
    for (int k = n - 1; k >= 0; --k)
        if (ok[k]) {
            last = k;
            break;
        }
    if (last < 0)
        fail(ErrorKind::NotFound, "no theta in (" + std::to_string(lo) + ", 1) yields an inverse-Ramsey outcome at R = " +
                                      std::to_string(r.value()));
    double a = th[last];
    double b = last + 1 < n ? th[last + 1] : 1.0;
    while (b - a > opt.theta_tol) {
        const double m = 0.5 * (a + b);
        (holds(m) ? a : b) = m;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Lump-sum comparison

enum class MuPathKind { Perceived, Adjusted };

/// mu(r) along the path of perceived solutions (or adjusted solutions) for
/// targets r in [0, R]. Built once per economy.
class MuPath {
public:
    explicit MuPath(const Economy& econ, MuPathKind kind = MuPathKind::Perceived)
        : scan_(econ), path_(scan_), kind_(kind) {}
    MuPath(const MuPath&) = delete;
    MuPath& operator=(const MuPath&) = delete;

    MuPathKind kind() const noexcept { return kind_; }
    const FocScan& scan() const noexcept { return scan_; }

    Solution solution(double r) const {
        if (kind_ == MuPathKind::Perceived)
            return path_.at(r);
        if (r <= 0.0)
            return path_.at(0.0);
        return adjust_budget(scan_, RevenueTarget(r)).inner;
    }

    double operator()(double r) const { return solution(r).mu; }

    /// Largest target up to which the path is defined (perceived path only;
    /// the adjusted path is probed numerically by the caller).
    double limit() const noexcept { return path_.max_revenue(); }

private:
    FocScan scan_;
    OriginPath path_;
    MuPathKind kind_;
};

inline double mu_of_r(const Economy& econ, double r, MuPathKind kind = MuPathKind::Perceived) {
    if (!(r >= 0.0))
        fail(ErrorKind::Domain, "revenue must be >= 0");
    // both paths start at the untaxed point
    if (r == 0.0)
        return make_solution({0.0, 0.0}, econ, Branch::OriginBranch).mu;
    return MuPath(econ, kind)(r);
}

struct LumpSumReport {
    double integral = 0.0;
    double target = 0.0;
    bool commodity_preferred = false;
    bool aperitivo_monotone = false;
    bool complete = true;      // false when the path ends before the target
    double integrated_to = 0.0;
};

/// d/dt [(1+t)^((1-theta)e) (1 - theta e t/(1+t))] < 0 for every sampled
/// t > 0 below the perceived Laffer rate of good 2.
inline bool aperitivo_monotone(const Economy& econ, int samples = 2000) {
    const GoodSpec& g = econ.good2();
    const double th = g.theta(), e = g.e();
    const double a = (1.0 - th) * e;
    const double c = 1.0 - th * e;
    const double hi = std::min(kTaxMax, detail::laffer_rate(th * e));
    for (int k = 1; k <= samples; ++k) {
        // uniform in log(1+t), excluding t = 0
        const double t = std::expm1(std::log1p(hi) * k / samples);
        const double bracket = (a - 1.0) * (1.0 + c * t) + c * (1.0 + t);
        if (!(bracket < 0.0))
            return false;
    }
    return true;
}

struct LumpSumOptions {
    MuPathKind path = MuPathKind::Perceived;
    double tol = 1e-7;
};

/// Integral of mu(r) over [0, R] against R itself: commodity taxation is
/// preferred to a lump sum iff the integral is smaller. If the path ends
/// before R the partial integral is reported with complete = false.
inline LumpSumReport lumpsum_compare(const Economy& econ, RevenueTarget target, const LumpSumOptions& opt = {}) {
    const double R = target.value();
    const MuPath mu(econ, opt.path);

    double upper = R;
    if (opt.path == MuPathKind::Perceived) {
        upper = std::min(R, mu.limit());
    } else {
        // first target where the adjusted path fails
        const auto ok = [&](double r) {
            try {
                (void)mu(r);
                return true;
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::Infeasible || e.kind() == ErrorKind::CornerSolution)
                    return false;
                throw;
            }
        };
        constexpr int kProbe = 32;
        for (int k = 1; k <= kProbe; ++k) {
            const double r = R * k / kProbe;
            if (!ok(r)) {
                double a = R * (k - 1) / kProbe, b = r;
                while (b - a > 1e-9 * std::max(1.0, R))
                    (ok(0.5 * (a + b)) ? a : b) = 0.5 * (a + b);
                upper = a;
                break;
            }
        }
    }

    LumpSumReport rep;
    rep.target = R;
    rep.integrated_to = upper;
    rep.complete = upper >= R;
    rep.integral = adaptive_simpson([&](double r) { return mu(r); }, 0.0, upper, opt.tol);
    rep.commodity_preferred = rep.complete && rep.integral < R;
    rep.aperitivo_monotone = aperitivo_monotone(econ);
    return rep;
}

} // namespace ritax
