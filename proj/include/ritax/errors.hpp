#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ritax/types.hpp"

namespace ritax {

enum class ErrorKind {
    Domain,
    NoSolution,
    EmptyLocus,
    Infeasible,
    CornerSolution,
    BoundaryCase,
    Unsupported,
    DegenerateMultiplier,
    NotFound,
    NoFeasiblePoint,
    Config,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::EmptyLocus: return "EmptyLocus";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::CornerSolution: return "CornerSolution";
    case ErrorKind::BoundaryCase: return "BoundaryCase";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::DegenerateMultiplier: return "DegenerateMultiplier";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// The perceived problem has no interior solution for the requested target.
/// `max_revenue` is the largest perceived revenue reached along the
/// perceived first-order locus.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double max_revenue)
        : Error(ErrorKind::Infeasible, what), max_revenue_(max_revenue) {}

    double max_revenue() const noexcept { return max_revenue_; }

private:
    double max_revenue_;
};

/// A point on the edge of the tax domain beats every interior critical point.
class CornerSolutionError : public Error {
public:
    CornerSolutionError(const std::string& what, TaxPair best, double welfare,
                        std::optional<TaxPair> interior = std::nullopt)
        : Error(ErrorKind::CornerSolution, what), best_(best), welfare_(welfare), interior_(interior) {}

    TaxPair best() const noexcept { return best_; }
    double welfare() const noexcept { return welfare_; }
    /// Best interior critical point, when one exists.
    std::optional<TaxPair> interior() const noexcept { return interior_; }

private:
    TaxPair best_;
    double welfare_;
    std::optional<TaxPair> interior_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace ritax
