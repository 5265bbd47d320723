#pragma once

// Randomized identities of the model, shared by the CLI `verify` command and
// the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ritax/analysis.hpp"
#include "ritax/model.hpp"

namespace ritax {

struct PropertyResult {
    std::string name;
    int samples = 0;
    int failures = 0;
    double worst = 0.0; // largest observed error
    double tolerance = 0.0;

    bool passed() const noexcept { return samples > 0 && failures == 0; }
};

namespace detail {

inline void record(PropertyResult& r, double err) {
    ++r.samples;
    if (!(err <= r.tolerance))
        ++r.failures;
    if (!(err <= r.worst))
        r.worst = std::isnan(err) ? err : std::max(r.worst, err);
}

inline PerceptionMode random_mode(std::mt19937_64& rng) {
    return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? PerceptionMode::TaxedOnly : PerceptionMode::Symmetric;
}

} // namespace detail

/// dW/dt_i = -x_i, by central differences. A quarter of the draws put e
/// within 1e-6 of 1, where the welfare term switches to its limit form.
inline PropertyResult check_roy_identity(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ue(0.2, 4.0), ut(-0.9, 5.0), unear(-1e-6, 1e-6);
    PropertyResult r{"roy_identity", 0, 0, 0.0, 1e-6};
    for (int k = 0; k < n; ++k) {
        const double e = k % 4 == 0 ? 1.0 + unear(rng) : ue(rng);
        const double t = ut(rng);
        const double h = 1e-6 * (1.0 + t);
        const double dw = (detail::welfare_term(t + h, e) - detail::welfare_term(t - h, e)) / (2.0 * h);
        const double x = true_demand(t, GoodSpec(e));
        detail::record(r, std::abs(dw + x) / x);
    }
    return r;
}

/// True and perceived demand are continuous at t = 0 in both modes.
inline PropertyResult check_demand_continuity(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ue(0.2, 4.0), uth(0.05, 1.0);
    PropertyResult r{"demand_continuity", 0, 0, 0.0, 1e-10};
    constexpr double eps = 1e-12;
    for (int k = 0; k < n; ++k) {
        const GoodSpec g(ue(rng), uth(rng));
        const PerceptionMode m = detail::random_mode(rng);
        const double jump = std::max(std::abs(perceived_demand(eps, g, m) - perceived_demand(-eps, g, m)),
                                     std::abs(true_demand(eps, g) - true_demand(-eps, g)));
        const double at0 = std::abs(perceived_demand(0.0, g, m) - 1.0);
        detail::record(r, std::max(jump, at0));
    }
    return r;
}

/// With theta = 1 perceived demand, revenue and the perceived budget equal
/// their true counterparts.
inline PropertyResult check_perfect_perception(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ue(0.2, 4.0), ut(-0.95, 10.0);
    PropertyResult r{"theta_one_coincidence", 0, 0, 0.0, 1e-12};
    for (int k = 0; k < n; ++k) {
        const Economy econ(GoodSpec(ue(rng)), GoodSpec(ue(rng)), detail::random_mode(rng));
        const TaxPair tp{ut(rng), ut(rng)};
        const double pr = perceived_revenue(tp, econ), tr = true_revenue(tp, econ);
        const double d1 = std::abs(perceived_demand(tp.t1, econ.good1(), econ.mode()) - true_demand(tp.t1, econ.good1()));
        detail::record(r, std::max(std::abs(pr - tr) / std::max(1.0, std::abs(tr)), d1));
    }
    return r;
}

/// mu(0) = 1 for arbitrary perceptions.
inline PropertyResult check_mu_at_zero(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ue(0.2, 4.0), uth(0.3, 1.0);
    PropertyResult r{"mu_at_zero", 0, 0, 0.0, 1e-8};
    for (int k = 0; k < n; ++k) {
        const Economy econ(GoodSpec(ue(rng), uth(rng)), GoodSpec(ue(rng), uth(rng)), detail::random_mode(rng));
        detail::record(r, std::abs(mu_of_r(econ, 0.0) - 1.0));
    }
    return r;
}

inline std::vector<PropertyResult> run_property_suite(std::uint64_t seed, int n) {
    return {check_roy_identity(seed, n), check_demand_continuity(seed + 1, n), check_perfect_perception(seed + 2, n),
            check_mu_at_zero(seed + 3, n)};
}

} // namespace ritax
