#pragma once

// Brute-force check of the perceived problem: on every row of a tensor grid
// (t1 fixed), project onto the perceived budget along t2 inside each cell
// the budget crosses, and keep the best welfare found.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ritax/errors.hpp"
#include "ritax/model.hpp"
#include "ritax/roots.hpp"
#include "ritax/types.hpp"

namespace ritax {

struct GridSpec {
    double t_min = -0.95;
    double t_max = 10.0;
    int n = 2001;
    double constraint_tol = 1e-10;

    void validate() const {
        if (!(t_min > -1.0) || !(t_max > t_min) || n < 10 || !(constraint_tol > 0.0))
            fail(ErrorKind::Domain, "invalid oracle grid");
    }
    double step() const noexcept { return (t_max - t_min) / (n - 1); }
};

struct OracleResult {
    TaxPair taxes;
    double welfare = 0.0;
    /// L * h: welfare Lipschitz bound near the optimum times the cell diagonal.
    double resolution_bound = 0.0;
};

namespace detail {

/// Axis values with 0 inserted when it falls inside the range.
inline std::vector<double> oracle_axis(const GridSpec& g) {
    std::vector<double> v(static_cast<std::size_t>(g.n));
    for (int k = 0; k < g.n; ++k)
        v[k] = g.t_min + (g.t_max - g.t_min) * k / (g.n - 1);
    if (g.t_min < 0.0 && g.t_max > 0.0) {
        auto it = std::lower_bound(v.begin(), v.end(), 0.0);
        if (*it != 0.0)
            v.insert(it, 0.0);
    }
    return v;
}

} // namespace detail

inline OracleResult grid_maximize_perceived(const Economy& econ, RevenueTarget target, const GridSpec& grid = {}) {
    grid.validate();
    const double R = target.value();
    const auto axis = detail::oracle_axis(grid);
    const std::size_t m = axis.size();
    std::vector<double> r1(m), r2(m);
    for (std::size_t k = 0; k < m; ++k) {
        r1[k] = detail::perceived_revenue_term(axis[k], econ.good1(), econ.mode());
        r2[k] = detail::perceived_revenue_term(axis[k], econ.good2(), econ.mode());
    }

    bool found = false;
    OracleResult best;
    best.welfare = -std::numeric_limits<double>::infinity();
    auto consider = [&](TaxPair p) {
        if (std::abs(perceived_revenue(p, econ) - R) >= grid.constraint_tol)
            return;
        const double w = welfare(p, econ);
        if (w > best.welfare) {
            best.taxes = p;
            best.welfare = w;
            found = true;
        }
    };

    for (std::size_t i = 0; i < m; ++i) {
        const double need = R - r1[i];
        const auto f = [&](double t2) {
            return detail::perceived_revenue_term(t2, econ.good2(), econ.mode()) - need;
        };
        for (std::size_t j = 0; j + 1 < m; ++j) {
            const double a = r2[j] - need, b = r2[j + 1] - need;
            if (a == 0.0) {
                consider({axis[i], axis[j]});
                continue;
            }
            if ((a > 0.0) == (b > 0.0) || b == 0.0)
                continue;
            if (auto t2 = find_root(f, axis[j], axis[j + 1], a, b, RootOptions{1e-14, 300}))
                consider({axis[i], *t2});
        }
        if (r2[m - 1] - need == 0.0)
            consider({axis[i], axis[m - 1]});
    }
    if (!found)
        fail(ErrorKind::NoFeasiblePoint, "the perceived budget constraint misses the oracle grid");

    const double h = grid.step();
    const double lo1 = std::max(best.taxes.t1 - h, grid.t_min);
    const double lo2 = std::max(best.taxes.t2 - h, grid.t_min);
    const double lip = std::hypot(true_demand(lo1, econ.good1()), true_demand(lo2, econ.good2()));
    best.resolution_bound = lip * h * std::sqrt(2.0);
    return best;
}

} // namespace ritax
