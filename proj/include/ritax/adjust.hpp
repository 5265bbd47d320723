#pragma once

// Budget adjustment: keep the planner's perceived FOC but raise (or lower)
// the perceived target R' until the chosen taxes raise R_true in truth.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ritax/errors.hpp"
#include "ritax/model.hpp"
#include "ritax/roots.hpp"
#include "ritax/solver.hpp"

namespace ritax {

struct AdjustedSolution {
    Solution inner;
    double adjusted_target = 0.0; // R'
    double true_target = 0.0;     // R
    std::vector<double> alternatives; // other R' that also satisfy the true budget
};

struct AdjustOptions {
    int scan_points = 64;
    double revenue_tol = 1e-12;
    double accept_residual = 1e-9;
};

namespace detail {

/// True revenue raised by the perceived solution at target r, or NaN when
/// the perceived problem has no interior solution there.
inline double adjusted_residual(const FocScan& scan, double r, double r_true) {
    try {
        const Solution s = solve_perceived(scan, RevenueTarget(r));
        return s.true_rev - r_true;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Infeasible || e.kind() == ErrorKind::CornerSolution)
            return kNaN;
        throw;
    }
}

} // namespace detail

/// Fixed point R' of R' -> true_revenue(solve_perceived(R')) = R_true.
/// With several fixed points the smallest R' is returned and the rest are
/// listed in `alternatives`.
inline AdjustedSolution adjust_budget(const FocScan& scan, RevenueTarget r_true, const AdjustOptions& opt = {}) {
    const double R = r_true.value();
    const auto h = [&](double r) { return detail::adjusted_residual(scan, r, R); };

    AdjustedSolution out;
    out.true_target = R;

    const double h0 = h(R);
    if (std::isfinite(h0) && std::abs(h0) <= opt.revenue_tol) {
        out.adjusted_target = R;
        out.inner = solve_perceived(scan, r_true);
        return out;
    }

    const double hi = scan.max_revenue();
    if (!(hi > R))
        throw InfeasibleError("no perceived target above " + std::to_string(R) + " is attainable on the FOC locus",
                              scan.max_revenue());

    std::vector<double> rs(static_cast<std::size_t>(opt.scan_points));
    std::vector<double> hs(rs.size());
    for (std::size_t k = 0; k < rs.size(); ++k) {
        rs[k] = R + (hi - R) * static_cast<double>(k) / static_cast<double>(rs.size() - 1);
        hs[k] = k == 0 ? h0 : h(rs[k]);
    }

    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < rs.size(); ++k) {
        if (!std::isfinite(hs[k]) || !std::isfinite(hs[k + 1]))
            continue;
        if ((hs[k] > 0.0) == (hs[k + 1] > 0.0) && hs[k + 1] != 0.0)
            continue;
        auto r = find_root(h, rs[k], rs[k + 1], hs[k], hs[k + 1], RootOptions{opt.revenue_tol, 300});
        // a jump between branches also changes sign; keep only genuine roots
        if (r && std::abs(h(*r)) < opt.accept_residual)
            if (roots.empty() || std::abs(*r - roots.back()) > 1e-9)
                roots.push_back(*r);
    }
    if (roots.empty()) {
        double best = -std::numeric_limits<double>::infinity();
        for (double v : hs)
            if (std::isfinite(v))
                best = std::max(best, v + R);
        throw InfeasibleError("true revenue along the perceived-solution path never reaches " + std::to_string(R) +
                                  " (max " + std::to_string(best) + ")",
                              best);
    }
    out.adjusted_target = roots.front();
    out.alternatives.assign(roots.begin() + 1, roots.end());
    out.inner = solve_perceived(scan, RevenueTarget(out.adjusted_target));
    return out;
}

inline AdjustedSolution adjust_budget(const Economy& econ, RevenueTarget r_true, const AdjustOptions& opt = {}) {
    return adjust_budget(FocScan(econ), r_true, opt);
}

} // namespace ritax
