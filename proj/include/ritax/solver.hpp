#pragma once

// The planner's perceived problem: maximise welfare subject to the
// misperceived budget t1*xbar1 + t2*xbar2 = R.
//
// Interior solutions satisfy g1(t1) = g2(t2), where
//   g_i(t) = (xbar_i / x_i) * (1 - ebar_i * t / (1 + t))
// is the perceived revenue gain per unit of private loss, and the revenue
// multiplier is mu = 1 / g1(t1). The solver works with the log form
//   F(t1, t2) = log g1(t1) - log g2(t2).
// For each monotone piece of g1 the locus F = 0 is a graph t1 = phi(t2);
// the budget is then a 1-D equation in t2 along each such branch.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ritax/continuation.hpp"
#include "ritax/errors.hpp"
#include "ritax/model.hpp"
#include "ritax/roots.hpp"
#include "ritax/types.hpp"

namespace ritax {

enum class CaseLabel { Case1, Case2, Case3, Case4 };

constexpr std::string_view to_string(CaseLabel c) noexcept {
    switch (c) {
    case CaseLabel::Case1: return "Case1";
    case CaseLabel::Case2: return "Case2";
    case CaseLabel::Case3: return "Case3";
    case CaseLabel::Case4: return "Case4";
    }
    return "Unknown";
}

enum class Branch { OriginBranch, OtherBranch };

constexpr std::string_view to_string(Branch b) noexcept {
    return b == Branch::OriginBranch ? "origin" : "other";
}

enum class CurveKind { PerceivedFOC, PerceivedBudget, TrueBudget, TrueFOC };

constexpr std::string_view to_string(CurveKind k) noexcept {
    switch (k) {
    case CurveKind::PerceivedFOC: return "perceived_foc";
    case CurveKind::PerceivedBudget: return "perceived_budget";
    case CurveKind::TrueBudget: return "true_budget";
    case CurveKind::TrueFOC: return "true_foc";
    }
    return "unknown";
}

/// Ordered samples of an implicit locus. A locus may have several connected
/// components inside the tracing box; each starts at an entry of
/// `segment_starts` and ended for the matching reason in `stops`.
struct CurveTrace {
    CurveKind kind = CurveKind::PerceivedFOC;
    std::vector<TaxPair> points;
    std::vector<std::size_t> segment_starts;
    std::vector<TraceStop> stops;
};

struct SolutionFlags {
    bool inverse_ramsey = false;
    bool subsidy_on_good1 = false;
};

struct Solution {
    TaxPair taxes;
    double mu = 1.0;
    double perceived_rev = 0.0;
    double true_rev = 0.0;
    double welfare = 0.0;
    std::optional<CaseLabel> case_label; // empty when theta1 != 1 or on a case boundary
    Branch branch = Branch::OriginBranch;
    SolutionFlags flags;
};

// ---------------------------------------------------------------------------
// Closed-form diagnostics (good 1 perfectly perceived)

/// dt1/dt2 of the perceived FOC locus at the origin, approached from t2 > 0.
inline double initial_slope(const Economy& econ) noexcept {
    const double e1 = econ.good1().e(), e2 = econ.good2().e(), th2 = econ.good2().theta();
    return 2.0 * (e2 / e1) * (th2 - 0.5);
}

/// t2 where dF/dt2 = 0, i.e. where t1 turns along the FOC locus, when that
/// rate is strictly positive.
inline std::optional<double> vertical_tangent_t2(const Economy& econ) noexcept {
    const double e2 = econ.good2().e(), th2 = econ.good2().theta();
    if (th2 >= 1.0)
        return std::nullopt;
    const double den = (1.0 - th2) * (1.0 - th2 * e2);
    if (den == 0.0)
        return std::nullopt;
    const double t = 2.0 * (th2 - 0.5) / den;
    if (t > 0.0)
        return t;
    return std::nullopt;
}

/// Peak of perceived revenue from good 2, t2 (1+t2)^(-theta2 e2).
inline std::optional<double> perceived_laffer_t2(const Economy& econ) noexcept {
    const double pe = econ.good2().perceived_e();
    if (pe > 1.0)
        return 1.0 / (pe - 1.0);
    return std::nullopt;
}

inline CaseLabel classify_case(const Economy& econ) {
    if (econ.good1().theta() != 1.0)
        fail(ErrorKind::Unsupported, "case taxonomy requires theta1 = 1");
    const double th2 = econ.good2().theta(), e2 = econ.good2().e();
    const double inv_e2 = 1.0 / e2;
    if (th2 == 0.5 || std::abs(th2 * e2 - 1.0) <= 1e-12)
        fail(ErrorKind::BoundaryCase, "theta2 = " + std::to_string(th2) +
                                          " lies on a case boundary (1/2 or 1/e2 = " +
                                          std::to_string(inv_e2) + ")");
    const bool positive_slope = th2 > 0.5;
    const bool laffer = th2 * e2 > 1.0;
    if (positive_slope)
        return laffer ? CaseLabel::Case1 : CaseLabel::Case3;
    return laffer ? CaseLabel::Case2 : CaseLabel::Case4;
}

// ---------------------------------------------------------------------------
// First-order condition

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// log g_i(t) = ((1-theta)e - 1) log(1+t) + log(1 + (1 - theta e) t); NaN past
/// the perceived Laffer rate.
inline double log_foc_term(double t, const GoodSpec& g, PerceptionMode mode) noexcept {
    if (!(t > -1.0))
        return kNaN;
    const double th = effective_theta(t, g, mode);
    const double c = 1.0 - th * g.e();
    if (!(1.0 + c * t > 0.0))
        return kNaN;
    return ((1.0 - th) * g.e() - 1.0) * std::log1p(t) + std::log1p(c * t);
}

inline double d_log_foc_term(double t, const GoodSpec& g, PerceptionMode mode) noexcept {
    if (!(t > -1.0))
        return kNaN;
    const double th = effective_theta(t, g, mode);
    const double c = 1.0 - th * g.e();
    const double inner = 1.0 + c * t;
    if (!(inner > 0.0))
        return kNaN;
    return ((1.0 - th) * g.e() - 1.0) / (1.0 + t) + c / inner;
}

/// d/dt of t * xbar(t).
inline double d_perceived_revenue_term(double t, const GoodSpec& g, PerceptionMode mode) noexcept {
    const double pe = perceived_elasticity(t, g, mode);
    return std::exp(-(pe + 1.0) * std::log1p(t)) * (1.0 + (1.0 - pe) * t);
}

inline double laffer_rate(double elasticity) noexcept {
    return elasticity > 1.0 ? 1.0 / (elasticity - 1.0) : std::numeric_limits<double>::infinity();
}

/// Interval on which log_foc_term is strictly monotone.
struct Piece {
    double lo;
    double hi;
    bool open_hi; // hi is a Laffer rate where the term diverges
};

/// Splits [lo, hi] into monotone pieces of log g for one good.
inline std::vector<Piece> monotone_pieces(const GoodSpec& g, PerceptionMode mode, double lo, double hi) {
    std::vector<double> cuts;
    bool open_hi = false;
    const double th = g.theta();
    const double laffer = laffer_rate(th * g.e());
    if (laffer < hi) {
        hi = laffer;
        open_hi = true;
    }
    // region where theta applies starts at 0 (TaxedOnly) or at lo (Symmetric)
    const double region_lo = mode == PerceptionMode::TaxedOnly ? 0.0 : lo;
    if (th < 1.0 && mode == PerceptionMode::TaxedOnly && lo < 0.0 && hi > 0.0)
        cuts.push_back(0.0);
    if (th < 1.0 && th * g.e() != 1.0) {
        const double tv = (2.0 * th - 1.0) / ((1.0 - th) * (1.0 - th * g.e()));
        if (tv > std::max(lo, region_lo) && tv < hi)
            cuts.push_back(tv);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Piece> out;
    double a = lo;
    for (double c : cuts) {
        out.push_back({a, c, false});
        a = c;
    }
    out.push_back({a, hi, open_hi});
    return out;
}

/// Solves log g(t) = target on a monotone piece; NaN when out of range.
inline double invert_on_piece(const GoodSpec& g, PerceptionMode mode, const Piece& p, double target) {
    if (!std::isfinite(target))
        return kNaN;
    const double b = p.open_hi ? p.hi - 1e-13 * std::max(1.0, std::abs(p.hi)) : p.hi;
    const auto f = [&](double t) { return log_foc_term(t, g, mode) - target; };
    // the upper end of the piece below 0 is evaluated from the left
    const double fa = f(p.lo);
    const double fb = p.hi == 0.0 ? -target : f(b);
    auto r = find_root(f, p.lo, b, fa, fb, RootOptions{1e-14, 300});
    return r ? *r : kNaN;
}

} // namespace detail

/// F(t1, t2) = log g1(t1) - log g2(t2). Zero exactly on the perceived FOC.
inline double foc_residual(TaxPair tp, const Economy& econ) {
    require_tax(tp.t1, "t1");
    require_tax(tp.t2, "t2");
    const double a = detail::log_foc_term(tp.t1, econ.good1(), econ.mode());
    const double b = detail::log_foc_term(tp.t2, econ.good2(), econ.mode());
    if (std::isnan(a) || std::isnan(b))
        fail(ErrorKind::Domain, "point lies beyond a perceived Laffer rate");
    return a - b;
}

/// Revenue multiplier implied by the good-1 condition, 1 / g1(t1).
inline double multiplier(double t1, const Economy& econ) {
    const double lg = detail::log_foc_term(t1, econ.good1(), econ.mode());
    if (std::isnan(lg))
        fail(ErrorKind::Domain, "t1 lies beyond the perceived Laffer rate of good 1");
    return std::exp(-lg);
}

namespace detail {

/// t1 on the FOC for a given log g2 value, one candidate per monotone piece
/// of g1. With theta1 = 1 there is a single piece and a closed form.
class FocInverse {
public:
    explicit FocInverse(const Economy& econ) : econ_(econ) {
        const GoodSpec& g1 = econ.good1();
        const double upper = std::min(kTaxMax, laffer_rate(g1.e()));
        closed_form_ = g1.theta() == 1.0;
        if (closed_form_)
            pieces_.push_back({kTaxMin, upper, upper < kTaxMax});
        else
            pieces_ = monotone_pieces(g1, econ.mode(), kTaxMin, kTaxMax);
    }

    std::size_t size() const noexcept { return pieces_.size(); }
    const Piece& piece(std::size_t k) const noexcept { return pieces_[k]; }
    bool touches_origin(std::size_t k) const noexcept {
        return pieces_[k].lo <= 0.0 && pieces_[k].hi >= 0.0;
    }

    double t1(std::size_t k, double log_g2) const {
        if (!std::isfinite(log_g2))
            return kNaN;
        if (closed_form_) {
            const double s = -std::expm1(log_g2) / econ_.good1().e();
            if (!(s < 1.0))
                return kNaN;
            const double t = s / (1.0 - s);
            return t >= kTaxMin && t <= kTaxMax ? t : kNaN;
        }
        return invert_on_piece(econ_.good1(), econ_.mode(), pieces_[k], log_g2);
    }

private:
    Economy econ_;
    bool closed_form_ = true;
    std::vector<Piece> pieces_;
};

inline std::vector<double> t2_scan_grid(const Economy& econ, std::size_t n) {
    double hi = kTaxMax;
    const double laffer = laffer_rate(econ.good2().perceived_e());
    if (laffer < hi)
        hi = laffer * (1.0 - 1e-9);
    const double ulo = std::log1p(kTaxMin), uhi = std::log1p(hi);
    std::vector<double> grid;
    grid.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        grid.push_back(std::expm1(ulo + (uhi - ulo) * static_cast<double>(i) / static_cast<double>(n - 1)));
    grid.front() = kTaxMin;
    grid.back() = hi;
    auto it = std::lower_bound(grid.begin(), grid.end(), 0.0);
    if (std::abs(*it) < 1e-300)
        *it = 0.0;
    else
        grid.insert(it, 0.0);
    return grid;
}

} // namespace detail

/// t1 on the perceived FOC for a given t2. Uses the closed form when good 1 is
/// perfectly perceived; otherwise the root on the first monotone branch of g1
/// (branches touching t1 = 0 first) that admits one.
inline double t1_on_foc(double t2, const Economy& econ) {
    require_tax(t2, "t2");
    const double lg2 = detail::log_foc_term(t2, econ.good2(), econ.mode());
    if (std::isnan(lg2))
        fail(ErrorKind::NoSolution, "t2 = " + std::to_string(t2) + " is past the perceived Laffer rate of good 2");
    const detail::FocInverse inv(econ);
    std::vector<std::size_t> order(inv.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return inv.touches_origin(a) && !inv.touches_origin(b);
    });
    for (std::size_t k : order) {
        const double t1 = inv.t1(k, lg2);
        if (std::isfinite(t1))
            return t1;
    }
    fail(ErrorKind::NoSolution, "no t1 in the tax domain satisfies the perceived FOC at t2 = " + std::to_string(t2));
}

/// Samples of the perceived FOC locus on a fixed t2 grid, one row per
/// monotone branch of g1. Independent of the revenue target, so one scan
/// serves every solve for the same economy.
class FocScan {
public:
    struct Row {
        std::size_t piece;
        bool touches_origin;
        std::vector<double> t1;   // NaN where the branch is undefined
        std::vector<double> prev; // perceived revenue at (t1, t2)
    };

    explicit FocScan(const Economy& econ, std::size_t n = 6001)
        : econ_(econ), inverse_(econ), t2_(detail::t2_scan_grid(econ, n)) {
        origin_ = static_cast<std::size_t>(std::lower_bound(t2_.begin(), t2_.end(), 0.0) - t2_.begin());
        std::vector<double> lg2(t2_.size());
        for (std::size_t j = 0; j < t2_.size(); ++j)
            lg2[j] = detail::log_foc_term(t2_[j], econ.good2(), econ.mode());
        for (std::size_t k = 0; k < inverse_.size(); ++k) {
            Row row{k, inverse_.touches_origin(k), std::vector<double>(t2_.size()),
                    std::vector<double>(t2_.size())};
            for (std::size_t j = 0; j < t2_.size(); ++j) {
                const double t1 = inverse_.t1(k, lg2[j]);
                row.t1[j] = t1;
                row.prev[j] = std::isnan(t1) ? detail::kNaN
                                             : detail::perceived_revenue_term(t1, econ.good1(), econ.mode()) +
                                                   detail::perceived_revenue_term(t2_[j], econ.good2(), econ.mode());
                if (row.prev[j] > max_revenue_)
                    max_revenue_ = row.prev[j];
            }
            rows_.push_back(std::move(row));
        }
    }

    const Economy& economy() const noexcept { return econ_; }
    const std::vector<double>& t2() const noexcept { return t2_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    std::size_t origin_index() const noexcept { return origin_; }
    /// Largest perceived revenue sampled along the FOC locus.
    double max_revenue() const noexcept { return max_revenue_; }

    /// Exact point of branch `row` at t2 (NaN t1 when undefined).
    TaxPair point(std::size_t row, double t2) const {
        const double lg2 = detail::log_foc_term(t2, econ_.good2(), econ_.mode());
        return {inverse_.t1(rows_[row].piece, lg2), t2};
    }

    double revenue_at(std::size_t row, double t2) const {
        const TaxPair p = point(row, t2);
        if (std::isnan(p.t1))
            return detail::kNaN;
        return detail::perceived_revenue_term(p.t1, econ_.good1(), econ_.mode()) +
               detail::perceived_revenue_term(p.t2, econ_.good2(), econ_.mode());
    }

    /// True when branch `row` is defined on every grid point between the
    /// origin and grid index j.
    bool connected_to_origin(std::size_t row, std::size_t j) const {
        const Row& r = rows_[row];
        if (!r.touches_origin)
            return false;
        const std::size_t a = std::min(j, origin_), b = std::max(j, origin_);
        for (std::size_t i = a; i <= b; ++i)
            if (std::isnan(r.t1[i]))
                return false;
        return true;
    }

private:
    Economy econ_;
    detail::FocInverse inverse_;
    std::vector<double> t2_;
    std::vector<Row> rows_;
    std::size_t origin_ = 0;
    double max_revenue_ = -std::numeric_limits<double>::infinity();
};

/// A point where the perceived FOC locus meets the perceived budget.
struct FocRoot {
    TaxPair taxes;
    std::size_t row;
    bool origin_connected;
};

/// Every intersection of the perceived FOC locus with perceived revenue = R.
inline std::vector<FocRoot> foc_budget_roots(const FocScan& scan, double R) {
    std::vector<FocRoot> roots;
    const auto& t2 = scan.t2();
    const RootOptions opt{1e-13, 300};

    for (std::size_t k = 0; k < scan.rows().size(); ++k) {
        const auto& rev = scan.rows()[k].prev;
        const auto h = [&](double t) { return scan.revenue_at(k, t) - R; };
        auto add = [&](double t, std::size_t j) {
            const TaxPair p = scan.point(k, t);
            if (std::isnan(p.t1))
                return;
            for (const auto& r : roots)
                if (r.row == k && std::abs(r.taxes.t2 - t) < 1e-9)
                    return;
            roots.push_back({p, k, scan.connected_to_origin(k, j)});
        };

        for (std::size_t j = 0; j + 1 < t2.size(); ++j) {
            const double a = rev[j] - R, b = rev[j + 1] - R;
            if (std::isnan(a) || std::isnan(b))
                continue;
            if (a == 0.0) {
                add(t2[j], j);
                continue;
            }
            if ((a > 0.0) != (b > 0.0) && b != 0.0) {
                if (auto r = find_root(h, t2[j], t2[j + 1], a, b, opt))
                    add(*r, j);
            }
            // pair of roots hidden inside one cell pair near a fold
            if (j > 0 && !std::isnan(rev[j - 1])) {
                const double c = rev[j - 1] - R;
                const bool same = (c > 0.0) == (a > 0.0) && (a > 0.0) == (b > 0.0);
                if (same && std::abs(a) < std::abs(c) && std::abs(a) <= std::abs(b)) {
                    const double sgn = a > 0.0 ? -1.0 : 1.0;
                    auto [tm, fm] = golden_maximize([&](double t) {
                        const double v = h(t);
                        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : sgn * v;
                    }, t2[j - 1], t2[j + 1]);
                    if (fm >= 0.0) {
                        const double hm = h(tm);
                        if (auto r = find_root(h, t2[j - 1], tm, c, hm, opt))
                            add(*r, j);
                        if (auto r = find_root(h, tm, t2[j + 1], hm, b, opt))
                            add(*r, j);
                    }
                }
            }
        }
    }
    return roots;
}

namespace detail {

inline bool inverse_ramsey_outcome(TaxPair tp, const Economy& econ) noexcept {
    const int i = econ.more_elastic_good();
    const double si = tax_share(i == 1 ? tp.t1 : tp.t2);
    const double sj = tax_share(i == 1 ? tp.t2 : tp.t1);
    return si > sj;
}

/// Best welfare among points on the edges of the tax domain that satisfy
/// perceived revenue = R.
inline std::optional<std::pair<TaxPair, double>> best_edge_point(const Economy& econ, double R) {
    std::optional<std::pair<TaxPair, double>> best;
    const double edges[2] = {kTaxMin, kTaxMax};
    for (int free = 1; free <= 2; ++free) {
        const GoodSpec& gf = econ.good(free);
        const GoodSpec& gx = econ.good(3 - free);
        std::vector<double> cuts{kTaxMin};
        const double laffer = laffer_rate(gf.perceived_e());
        if (laffer < kTaxMax)
            cuts.push_back(laffer);
        cuts.push_back(kTaxMax);
        for (double fixed : edges) {
            const double need = R - perceived_revenue_term(fixed, gx, econ.mode());
            const auto f = [&](double t) { return perceived_revenue_term(t, gf, econ.mode()) - need; };
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                auto r = find_root(f, cuts[c], cuts[c + 1], RootOptions{1e-13, 300});
                if (!r)
                    continue;
                const TaxPair p = free == 1 ? TaxPair{*r, fixed} : TaxPair{fixed, *r};
                const double w = welfare(p, econ);
                if (!best || w > best->second)
                    best = std::pair{p, w};
            }
        }
    }
    return best;
}

} // namespace detail

/// Fills the derived fields of a solution at an FOC point.
inline Solution make_solution(TaxPair taxes, const Economy& econ, Branch branch) {
    Solution s;
    s.taxes = taxes;
    s.mu = multiplier(taxes.t1, econ);
    s.perceived_rev = perceived_revenue(taxes, econ);
    s.true_rev = true_revenue(taxes, econ);
    s.welfare = welfare(taxes, econ);
    s.branch = branch;
    s.flags.inverse_ramsey = detail::inverse_ramsey_outcome(taxes, econ);
    s.flags.subsidy_on_good1 = taxes.t1 < 0.0;
    if (econ.good1().theta() == 1.0) {
        try {
            s.case_label = classify_case(econ);
        } catch (const Error&) {
            s.case_label.reset();
        }
    }
    return s;
}

/// Solves the perceived problem on a precomputed scan. Among several
/// FOC/budget intersections the one with the highest welfare wins; near-ties
/// go to the branch connected to the origin.
inline Solution solve_perceived(const FocScan& scan, RevenueTarget target) {
    const Economy& econ = scan.economy();
    const double R = target.value();
    const auto roots = foc_budget_roots(scan, R);

    const FocRoot* best = nullptr;
    double best_w = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) {
        const double w = welfare(r.taxes, econ);
        const double tie = 1e-12 * std::max(1.0, std::abs(w));
        const bool better = w > best_w + tie ||
                            (std::abs(w - best_w) <= tie && best &&
                             ((r.origin_connected && !best->origin_connected) ||
                              (r.origin_connected == best->origin_connected &&
                               std::abs(r.taxes.t2) < std::abs(best->taxes.t2))));
        if (!best || better) {
            best = &r;
            best_w = w;
        }
    }

    const auto edge = detail::best_edge_point(econ, R);
    if (!best) {
        if (edge)
            throw CornerSolutionError("no interior solution; the best feasible point lies on the edge of the tax domain",
                                      edge->first, edge->second);
        throw InfeasibleError("perceived revenue target " + std::to_string(R) +
                                  " is not attained on the perceived FOC locus (max " +
                                  std::to_string(scan.max_revenue()) + ")",
                              scan.max_revenue());
    }
    if (edge && edge->second > best_w + 1e-10 * std::max(1.0, std::abs(best_w)))
        throw CornerSolutionError("an edge of the tax domain beats every interior critical point",
                                  edge->first, edge->second, best->taxes);

    return make_solution(best->taxes, econ,
                         best->origin_connected ? Branch::OriginBranch : Branch::OtherBranch);
}

inline Solution solve_perceived(const Economy& econ, RevenueTarget target) {
    return solve_perceived(FocScan(econ), target);
}

/// Solutions obtained by raising the target continuously from zero along the
/// FOC branch that leaves the origin with increasing perceived revenue.
class OriginPath {
public:
    explicit OriginPath(const FocScan& scan) : scan_(&scan) {
        const std::size_t o = scan.origin_index();
        const std::size_t n = scan.t2().size();
        double best_first = 0.0;
        for (std::size_t k = 0; k < scan.rows().size(); ++k) {
            const auto& row = scan.rows()[k];
            if (!row.touches_origin || std::isnan(row.t1[o]))
                continue;
            for (int dir : {+1, -1}) {
                if ((dir < 0 && o == 0) || (dir > 0 && o + 1 >= n))
                    continue;
                const double first = row.prev[o + dir];
                if (std::isfinite(first) && first > best_first) {
                    best_first = first;
                    row_ = k;
                    dir_ = dir;
                }
            }
        }
        if (dir_ == 0)
            return;
        const auto& rev = scan.rows()[row_].prev;
        idx_.push_back(o);
        for (std::size_t j = o + dir_; j < n; j += dir_) {
            if (std::isnan(rev[j]) || rev[j] <= rev[idx_.back()])
                break;
            idx_.push_back(j);
            if (j == 0)
                break;
        }
        fold_ = rev[idx_.back()];
    }

    /// Highest target reachable before the path folds.
    double max_revenue() const noexcept { return fold_; }

    Solution at(double r) const {
        const Economy& econ = scan_->economy();
        if (r <= 0.0)
            return make_solution({0.0, 0.0}, econ, Branch::OriginBranch);
        if (dir_ == 0 || r > fold_)
            throw InfeasibleError("revenue " + std::to_string(r) + " is beyond the fold of the origin path (max " +
                                      std::to_string(fold_) + ")",
                                  fold_);
        const auto& rev = scan_->rows()[row_].prev;
        const auto& t2 = scan_->t2();
        // rev is increasing along idx_
        std::size_t lo = 0, hi = idx_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (rev[idx_[mid]] < r ? lo : hi) = mid;
        }
        const double a = t2[idx_[lo]], b = t2[idx_[hi]];
        const auto h = [&](double t) { return scan_->revenue_at(row_, t) - r; };
        auto t = find_root(h, a, b, rev[idx_[lo]] - r, rev[idx_[hi]] - r, RootOptions{1e-13, 300});
        if (!t)
            throw InfeasibleError("origin path root refinement failed", fold_);
        return make_solution(scan_->point(row_, *t), econ, Branch::OriginBranch);
    }

private:
    const FocScan* scan_;
    std::size_t row_ = 0;
    int dir_ = 0;
    std::vector<std::size_t> idx_;
    double fold_ = 0.0;
};

// ---------------------------------------------------------------------------
// Curve tracing

namespace detail {

inline ImplicitCurve foc_curve(const Economy& econ) {
    return {
        [econ](TaxPair p) {
            return log_foc_term(p.t1, econ.good1(), econ.mode()) - log_foc_term(p.t2, econ.good2(), econ.mode());
        },
        [econ](TaxPair p) {
            return Vec2{d_log_foc_term(p.t1, econ.good1(), econ.mode()),
                        -d_log_foc_term(p.t2, econ.good2(), econ.mode())};
        },
    };
}

inline ImplicitCurve budget_curve(const Economy& econ, double R) {
    return {
        [econ, R](TaxPair p) {
            if (!(p.t1 > -1.0 && p.t2 > -1.0))
                return kNaN;
            return perceived_revenue_term(p.t1, econ.good1(), econ.mode()) +
                   perceived_revenue_term(p.t2, econ.good2(), econ.mode()) - R;
        },
        [econ](TaxPair p) {
            return Vec2{d_perceived_revenue_term(p.t1, econ.good1(), econ.mode()),
                        d_perceived_revenue_term(p.t2, econ.good2(), econ.mode())};
        },
    };
}

inline bool near_trace(const CurveTrace& c, TaxPair p, double tol) {
    for (const auto& q : c.points)
        if (distance(p, q) < tol)
            return true;
    return false;
}

/// Traces the component through `seed` in both directions and appends it
/// as one segment, ordered from one end to the other.
inline void append_component(CurveTrace& out, const ImplicitCurve& curve, TaxPair seed, const Box& box,
                             const TraceOptions& opt, Vec2 forward) {
    auto fwd = trace_branch(curve, seed, forward, box, opt);
    out.segment_starts.push_back(out.points.size());
    if (fwd.stop == TraceStop::ClosedLoop) {
        out.points.insert(out.points.end(), fwd.points.begin(), fwd.points.end());
        out.stops.push_back(fwd.stop);
        return;
    }
    auto bwd = trace_branch(curve, seed, Vec2{-forward[0], -forward[1]}, box, opt);
    out.points.insert(out.points.end(), bwd.points.rbegin(), bwd.points.rend());
    out.points.insert(out.points.end(), fwd.points.begin() + 1, fwd.points.end());
    out.stops.push_back(fwd.stop);
}

inline Economy foc_economy(const Economy& econ, CurveKind kind) {
    return kind == CurveKind::TrueFOC ? econ.without_misperception() : econ;
}

} // namespace detail

/// Traces the perceived (or true, with kind = TrueFOC) FOC locus inside
/// `box`, starting at the origin and heading towards increasing t2. Further
/// components met by the branch scan are appended as extra segments.
inline CurveTrace trace_foc_curve(const Economy& econ, const Box& box = {kTaxMin, kTaxMax, 0.0, kTaxMax},
                                  CurveKind kind = CurveKind::PerceivedFOC, const TraceOptions& opt = {}) {
    if (kind != CurveKind::PerceivedFOC && kind != CurveKind::TrueFOC)
        fail(ErrorKind::Domain, "trace_foc_curve needs an FOC curve kind");
    if (!box.contains({0.0, 0.0}))
        fail(ErrorKind::Domain, "FOC tracing box must contain the origin");
    const Economy e = detail::foc_economy(econ, kind);
    const ImplicitCurve curve = detail::foc_curve(e);

    CurveTrace out;
    out.kind = kind;
    out.segment_starts.push_back(0);
    auto fwd = trace_branch(curve, {0.0, 0.0}, {0.0, 1.0}, box, opt);
    if (box.t2_min < 0.0) {
        auto bwd = trace_branch(curve, {0.0, 0.0}, {0.0, -1.0}, box, opt);
        out.points.assign(bwd.points.rbegin(), bwd.points.rend());
        out.points.insert(out.points.end(), fwd.points.begin() + 1, fwd.points.end());
    } else {
        out.points = std::move(fwd.points);
    }
    out.stops.push_back(fwd.stop);

    // components not connected to the origin
    const FocScan scan(e, 2001);
    for (std::size_t k = 0; k < scan.rows().size(); ++k) {
        const auto& t1 = scan.rows()[k].t1;
        for (std::size_t j = 0; j < t1.size(); j += 10) {
            const TaxPair seed{t1[j], scan.t2()[j]};
            if (std::isnan(seed.t1) || !box.contains(seed))
                continue;
            if (detail::near_trace(out, seed, 2.0 * opt.max_step))
                continue;
            detail::append_component(out, curve, seed, box, opt, {0.0, 1.0});
        }
    }
    return out;
}

/// Largest value of revenue attainable on the tax domain (perceived or true).
inline double max_revenue_on_domain(const Economy& econ, CurveKind which) {
    const Economy e = which == CurveKind::TrueBudget ? econ.without_misperception() : econ;
    double total = 0.0;
    for (int i = 1; i <= 2; ++i) {
        const GoodSpec& g = e.good(i);
        const double peak = std::min(kTaxMax, detail::laffer_rate(g.perceived_e()));
        total += detail::perceived_revenue_term(peak, g, e.mode());
    }
    return total;
}

/// Traces {revenue(t1, t2) = R} for perceived or true revenue inside `box`.
inline CurveTrace trace_budget_curve(const Economy& econ, RevenueTarget target, CurveKind which,
                                     const Box& box = {}, const TraceOptions& opt = {}) {
    if (which != CurveKind::PerceivedBudget && which != CurveKind::TrueBudget)
        fail(ErrorKind::Domain, "trace_budget_curve needs a budget curve kind");
    const double R = target.value();
    const double rmax = max_revenue_on_domain(econ, which);
    if (R > rmax)
        fail(ErrorKind::EmptyLocus, "revenue " + std::to_string(R) + " exceeds the maximum " + std::to_string(rmax) +
                                        " attainable on the tax domain");
    const Economy e = which == CurveKind::TrueBudget ? econ.without_misperception() : econ;
    const ImplicitCurve curve = detail::budget_curve(e, R);

    CurveTrace out;
    out.kind = which;

    // seeds: crossings of the locus with a lattice of lines through the box
    constexpr int kLines = 41;
    auto seeds_on_line = [&](int free, double fixed) {
        std::vector<TaxPair> seeds;
        const GoodSpec& gf = e.good(free);
        const GoodSpec& gx = e.good(3 - free);
        const double lo = free == 1 ? box.t1_min : box.t2_min;
        const double hi = free == 1 ? box.t1_max : box.t2_max;
        std::vector<double> cuts{lo};
        const double laffer = detail::laffer_rate(gf.perceived_e());
        if (laffer > lo && laffer < hi)
            cuts.push_back(laffer);
        cuts.push_back(hi);
        const double need = R - detail::perceived_revenue_term(fixed, gx, e.mode());
        const auto f = [&](double t) { return detail::perceived_revenue_term(t, gf, e.mode()) - need; };
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
            if (auto r = find_root(f, cuts[c], cuts[c + 1], RootOptions{1e-14, 300}))
                seeds.push_back(free == 1 ? TaxPair{*r, fixed} : TaxPair{fixed, *r});
        return seeds;
    };
    std::vector<TaxPair> seeds;
    // R = 0 always passes through the origin; start there so it is a sample
    if (R == 0.0 && box.contains({0.0, 0.0}))
        seeds.push_back({0.0, 0.0});
    for (int i = 0; i < kLines; ++i) {
        const double u = static_cast<double>(i) / (kLines - 1);
        for (auto s : seeds_on_line(2, box.t1_min + u * (box.t1_max - box.t1_min)))
            seeds.push_back(s);
        for (auto s : seeds_on_line(1, box.t2_min + u * (box.t2_max - box.t2_min)))
            seeds.push_back(s);
    }
    for (const auto& s : seeds) {
        if (!box.contains(s) || detail::near_trace(out, s, 2.0 * opt.max_step))
            continue;
        detail::append_component(out, curve, s, box, opt, {-1.0, 1.0});
    }
    return out;
}

} // namespace ritax
