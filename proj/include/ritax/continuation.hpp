#pragma once

// Pseudo-arclength continuation of a planar implicit curve f(t1, t2) = 0.
//
// Each step predicts along the unit tangent and corrects with Newton on the
// bordered system { f(x) = 0, tau . (x - p) = h }. Steps are halved on
// failure and doubled on success up to max_step. Where a tangent component
// changes sign between samples the turning point is located and inserted,
// so extrema of t1 (or t2) along the curve are actual samples.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "ritax/types.hpp"

namespace ritax {

using Vec2 = std::array<double, 2>;

struct ImplicitCurve {
    /// Curve function; NaN signals a point outside its domain.
    std::function<double(TaxPair)> value;
    /// Gradient (d/dt1, d/dt2).
    std::function<Vec2(TaxPair)> gradient;
};

enum class TraceStop { LeftBox, ClosedLoop, Stalled, MaxPoints };

constexpr std::string_view to_string(TraceStop s) noexcept {
    switch (s) {
    case TraceStop::LeftBox: return "left_box";
    case TraceStop::ClosedLoop: return "closed_loop";
    case TraceStop::Stalled: return "stalled";
    case TraceStop::MaxPoints: return "max_points";
    }
    return "unknown";
}

struct TraceOptions {
    double initial_step = 1e-5;
    double max_step = 1e-2;
    double min_step = 1e-13;
    double residual_tol = 1e-11;
    double max_turn = 0.15; // radians between consecutive tangents
    double kink_step = 1e-9;
    std::size_t max_points = 200000;
};

struct TracedBranch {
    std::vector<TaxPair> points;
    TraceStop stop = TraceStop::Stalled;
};

namespace detail {

inline std::optional<Vec2> unit_tangent(const ImplicitCurve& c, TaxPair p, const Vec2& orient) {
    const Vec2 g = c.gradient(p);
    const double n = std::hypot(g[0], g[1]);
    if (!(n > 0.0) || !std::isfinite(n))
        return std::nullopt;
    Vec2 tau{-g[1] / n, g[0] / n};
    if (tau[0] * orient[0] + tau[1] * orient[1] < 0.0)
        tau = {-tau[0], -tau[1]};
    return tau;
}

/// Newton on { f(x) = 0, tau . (x - p) = s } from the predictor p + s tau.
inline std::optional<TaxPair> correct(const ImplicitCurve& c, TaxPair p, const Vec2& tau, double s,
                                      double tol) {
    TaxPair x{p.t1 + s * tau[0], p.t2 + s * tau[1]};
    for (int it = 0; it < 16; ++it) {
        const double f = c.value(x);
        if (!std::isfinite(f))
            return std::nullopt;
        const double r = tau[0] * (x.t1 - p.t1) + tau[1] * (x.t2 - p.t2) - s;
        const Vec2 g = c.gradient(x);
        const double det = g[0] * tau[1] - g[1] * tau[0];
        if (!std::isfinite(det) || det == 0.0)
            return std::nullopt;
        const double d1 = (f * tau[1] - g[1] * r) / det;
        const double d2 = (g[0] * r - tau[0] * f) / det;
        x.t1 -= d1;
        x.t2 -= d2;
        if (!(x.t1 > -1.0 && x.t2 > -1.0))
            return std::nullopt;
        if (std::hypot(d1, d2) < 1e-15 * (1.0 + std::hypot(x.t1, x.t2))) {
            const double fx = c.value(x);
            if (std::isfinite(fx) && std::abs(fx) <= tol)
                return x;
        }
        if (it >= 2) {
            const double fx = c.value(x);
            if (std::isfinite(fx) && std::abs(fx) <= 0.01 * tol)
                return x;
        }
    }
    const double fx = c.value(x);
    if (std::isfinite(fx) && std::abs(fx) <= tol)
        return x;
    return std::nullopt;
}

} // namespace detail

/// Traces one branch from `start` (assumed on the curve) heading along
/// `direction`, until it leaves `box`, closes on itself, or stalls.
inline TracedBranch trace_branch(const ImplicitCurve& curve, TaxPair start, Vec2 direction,
                                 const Box& box, const TraceOptions& opt = {}) {
    TracedBranch out;
    out.points.push_back(start);

    // one-sided tangent, in case the gradient has a kink at start
    const double dn = std::hypot(direction[0], direction[1]);
    auto tau0 = dn > 0.0 ? detail::unit_tangent(
                               curve, {start.t1 + 1e-10 * direction[0] / dn, start.t2 + 1e-10 * direction[1] / dn},
                               direction)
                         : std::nullopt;
    if (!tau0)
        tau0 = detail::unit_tangent(curve, start, direction);
    if (!tau0)
        return out;
    Vec2 tau = *tau0;
    TaxPair p = start;
    double h = opt.initial_step;
    double arc = 0.0;
    const double cos_max = std::cos(opt.max_turn);

    while (out.points.size() < opt.max_points) {
        std::optional<TaxPair> q;
        std::optional<Vec2> tau_q;
        while (h >= opt.min_step) {
            q = detail::correct(curve, p, tau, h, opt.residual_tol);
            if (q && distance(*q, p) <= 1.5 * h) {
                tau_q = detail::unit_tangent(curve, *q, tau);
                // below kink_step a large turn is a gradient kink, not a fold
                if (tau_q && (tau[0] * (*tau_q)[0] + tau[1] * (*tau_q)[1] >= cos_max || h < opt.kink_step))
                    break;
            }
            q.reset();
            h *= 0.5;
        }
        if (!q) {
            out.stop = TraceStop::Stalled;
            return out;
        }

        if (!box.contains(*q)) {
            // largest step that stays inside the box
            double lo = 0.0, hi = h;
            std::optional<TaxPair> edge;
            for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto m = detail::correct(curve, p, tau, mid, opt.residual_tol);
                if (m && box.contains(*m)) {
                    lo = mid;
                    edge = m;
                } else {
                    hi = mid;
                }
            }
            if (edge && distance(*edge, p) > 0.0)
                out.points.push_back(*edge);
            out.stop = TraceStop::LeftBox;
            return out;
        }

        for (int k = 0; k < 2; ++k) {
            if (tau[k] * (*tau_q)[k] < 0.0) {
                double lo = 0.0, hi = h;
                std::optional<TaxPair> turn;
                for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    auto m = detail::correct(curve, p, tau, mid, opt.residual_tol);
                    if (!m)
                        break;
                    auto tm = detail::unit_tangent(curve, *m, tau);
                    if (!tm)
                        break;
                    turn = m;
                    if (tau[k] * (*tm)[k] > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                if (turn && distance(*turn, p) > 0.0 && distance(*turn, *q) > 0.0)
                    out.points.push_back(*turn);
                break;
            }
        }

        arc += distance(*q, p);
        out.points.push_back(*q);
        p = *q;
        tau = *tau_q;

        if (arc > 4.0 * opt.max_step && distance(p, start) < std::max(h, 1e-9)) {
            out.points.push_back(start);
            out.stop = TraceStop::ClosedLoop;
            return out;
        }
        h = std::min(2.0 * h, opt.max_step);
    }
    out.stop = TraceStop::MaxPoints;
    return out;
}

} // namespace ritax
