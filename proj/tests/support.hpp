#pragma once

// Reference computations for the tests, written directly from the model
// formulas with std::pow and plain bisection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ritax/types.hpp"

namespace ref {

inline double demand(double t, double e) { return std::pow(1.0 + t, -e); }

inline double perceived_demand(double t, double e, double theta, bool symmetric = false) {
    const double th = (symmetric || t > 0.0) ? theta : 1.0;
    return std::pow(1.0 + t, -th * e);
}

inline double revenue_term(double t, double e, double theta, bool symmetric = false) {
    return t * perceived_demand(t, e, theta, symmetric);
}

/// Consumer-surplus loss of a price rise from 1 to 1 + t (negative for t > 0).
inline double welfare_term(double t, double e) {
    if (std::abs(e - 1.0) < 1e-9)
        return -std::log(1.0 + t);
    return -(std::pow(1.0 + t, 1.0 - e) - 1.0) / (1.0 - e);
}

inline std::optional<double> bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
    double fa = f(a), fb = f(b);
    if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0) == (fb > 0))
        return std::nullopt;
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct Econ {
    double e1, th1, e2, th2;
};

/// Best welfare on the perceived budget, scanning t2 and solving the budget
/// for t1 on its increasing branch, then polishing with golden section.
inline std::optional<std::pair<ritax::TaxPair, double>> brute_force_optimum(const Econ& ec, double R, double t2_lo,
                                                                            double t2_hi, int n = 20000) {
    const double pe1 = ec.th1 * ec.e1;
    const double t1_hi = pe1 > 1.0 ? std::min(100.0, 1.0 / (pe1 - 1.0)) : 100.0;
    auto t1_of = [&](double t2) -> std::optional<double> {
        const double need = R - revenue_term(t2, ec.e2, ec.th2);
        return bisect([&](double t1) { return revenue_term(t1, ec.e1, ec.th1) - need; }, -0.99, t1_hi, 120);
    };
    auto w = [&](double t2) {
        auto t1 = t1_of(t2);
        return t1 ? welfare_term(*t1, ec.e1) + welfare_term(t2, ec.e2) : -INFINITY;
    };
    double best_t2 = NAN, best_w = -INFINITY;
    for (int k = 0; k <= n; ++k) {
        const double t2 = t2_lo + (t2_hi - t2_lo) * k / n;
        const double v = w(t2);
        if (v > best_w) {
            best_w = v;
            best_t2 = t2;
        }
    }
    if (!std::isfinite(best_w))
        return std::nullopt;
    const double h = (t2_hi - t2_lo) / n;
    double a = std::max(t2_lo, best_t2 - h), b = std::min(t2_hi, best_t2 + h);
    const double g = 0.6180339887498949;
    for (int i = 0; i < 200; ++i) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (w(c) > w(d))
            b = d;
        else
            a = c;
    }
    const double t2 = 0.5 * (a + b);
    return std::pair{ritax::TaxPair{*t1_of(t2), t2}, w(t2)};
}

/// Intersections of two polylines, restricted to segments near `around`.
inline std::vector<ritax::TaxPair> polyline_intersections(const std::vector<ritax::TaxPair>& a,
                                                          const std::vector<ritax::TaxPair>& b,
                                                          ritax::TaxPair around, double radius) {
    auto near = [&](const ritax::TaxPair& p) { return ritax::distance(p, around) < radius; };
    std::vector<ritax::TaxPair> out;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        if (!near(a[i]) && !near(a[i + 1]))
            continue;
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            if (!near(b[j]) && !near(b[j + 1]))
                continue;
            const double rx = a[i + 1].t1 - a[i].t1, ry = a[i + 1].t2 - a[i].t2;
            const double sx = b[j + 1].t1 - b[j].t1, sy = b[j + 1].t2 - b[j].t2;
            const double den = rx * sy - ry * sx;
            if (den == 0.0)
                continue;
            const double qx = b[j].t1 - a[i].t1, qy = b[j].t2 - a[i].t2;
            const double u = (qx * sy - qy * sx) / den, v = (qx * ry - qy * rx) / den;
            if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)
                out.push_back({a[i].t1 + u * rx, a[i].t2 + u * ry});
        }
    }
    return out;
}

} // namespace ref
