#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "meanbounds/error.hpp"

namespace meanbounds::means {

/// Ordered pair of strictly positive reals, the arguments of every mean.
struct PositivePair {
    double a;
    double b;

    PositivePair(double a_, double b_) : a(a_), b(b_)
    {
        meanbounds::detail::require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b),
                        "PositivePair: a and b must be finite and > 0");
    }

    [[nodiscard]] PositivePair swapped() const { return {b, a}; }
    [[nodiscard]] PositivePair scaled(double lambda) const { return {lambda * a, lambda * b}; }
    // (max, min), the order expected by normalized_contrast.
    [[nodiscard]] PositivePair ordered() const { return a >= b ? *this : swapped(); }
};

inline constexpr std::size_t agm_max_iterations = 40;
inline constexpr double agm_default_tol = 1e-16;

/// Arithmetic-geometric mean iteration and its history.
///
/// `a_seq[0], b_seq[0]` hold the inputs; entry k holds the k-th iterate.
/// From k = 1 on, `a_seq` is nonincreasing, `b_seq` nondecreasing and
/// `b_seq[k] <= value <= a_seq[k]`.
struct AgmTrace {
    std::vector<double> a_seq;
    std::vector<double> b_seq;
    double value = 0.0;
    std::size_t iterations = 0;
};

namespace detail {

// Runs the recursion a' = (a+b)/2, b' = sqrt(ab), calling visit(a, b) on the
// inputs and on every iterate. Returns (a_n + b_n)/2 at stop.
//
// Stops when |a_n - b_n| <= tol * a_n, or when the gap stops shrinking: once
// a and b are a few ulps apart rounding can cycle and the gap can never fall
// below tol. b' is clamped to a' so the G <= A ordering survives rounding.
template <class Visit>
double agm_iterate(double a, double b, double tol, std::size_t& iterations, Visit&& visit)
{
    meanbounds::detail::require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b),
                                "agm: arguments must be finite and > 0");
    meanbounds::detail::require(tol >= 0.0 && std::isfinite(tol), "agm: tol must be finite and >= 0");

    iterations = 0;
    visit(a, b);
    double gap = std::abs(a - b);
    while (gap > tol * std::max(a, b)) {
        if (iterations == agm_max_iterations)
            throw convergence_error("agm: no convergence after " + std::to_string(agm_max_iterations) +
                                    " iterations");
        const double next_a = 0.5 * (a + b);
        double next_b = std::sqrt(a * b);
        if (next_b > next_a)
            next_b = next_a;
        ++iterations;
        visit(next_a, next_b);
        const double next_gap = next_a - next_b;
        a = next_a;
        b = next_b;
        if (iterations > 1 && next_gap >= gap)
            break;
        gap = next_gap;
    }
    return 0.5 * (a + b);
}

inline double agm_value(double a, double b, double tol = agm_default_tol)
{
    std::size_t iterations = 0;
    return agm_iterate(a, b, tol, iterations, [](double, double) {});
}

} // namespace detail

/// AG(a, b): the common limit of the arithmetic and geometric mean sequences.
/// The reported value is (a_n + b_n)/2 at the stopping step.
inline AgmTrace agm(const PositivePair& p, double tol = agm_default_tol)
{
    AgmTrace trace;
    trace.value = detail::agm_iterate(p.a, p.b, tol, trace.iterations, [&trace](double a, double b) {
        trace.a_seq.push_back(a);
        trace.b_seq.push_back(b);
    });
    return trace;
}

} // namespace meanbounds::means
