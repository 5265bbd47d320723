#pragma once

#include <cmath>
#include <optional>
#include <utility>

namespace ritax {

struct RootOptions {
    double xtol = 1e-10;
    int max_iter = 200;
};

/// Root of f on [a, b] given f(a) and f(b) of opposite sign (or one of
/// them zero). Secant steps are taken when they land inside the bracket
/// and shrink it fast enough; otherwise the step is a bisection, so the
/// bracket at least halves every two iterations.
template <class F>
std::optional<double> find_root(F&& f, double a, double b, double fa, double fb,
                                const RootOptions& opt = {}) {
    if (!(std::isfinite(fa) && std::isfinite(fb)))
        return std::nullopt;
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if ((fa > 0.0) == (fb > 0.0))
        return std::nullopt;

    // widths[0] is the bracket two iterations ago, widths[1] one ago
    double widths[2] = {2.0 * std::abs(b - a), 2.0 * std::abs(b - a)};
    for (int it = 0; it < opt.max_iter && std::abs(b - a) > opt.xtol; ++it) {
        const double w = std::abs(b - a);
        const double lo = std::min(a, b), hi = std::max(a, b);
        double x = b - fb * (b - a) / (fb - fa);
        const double margin = 1e-3 * (hi - lo);
        if (w > 0.5 * widths[0] || !(x > lo + margin && x < hi - margin))
            x = 0.5 * (a + b);
        widths[0] = widths[1];
        widths[1] = w;

        const double fx = f(x);
        if (!std::isfinite(fx))
            return std::nullopt;
        if (fx == 0.0)
            return x;
        if ((fx > 0.0) == (fa > 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

template <class F>
std::optional<double> find_root(F&& f, double a, double b, const RootOptions& opt = {}) {
    return find_root(f, a, b, f(a), f(b), opt);
}

/// Golden-section search for a local maximum of f on [a, b].
/// Returns (argmax, max).
template <class F>
std::pair<double, double> golden_maximize(F&& f, double a, double b, double xtol = 1e-12,
                                          int max_iter = 200) {
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

} // namespace ritax
