#pragma once

#include <cmath>
#include <cstddef>

#include "meanbounds/error.hpp"

namespace meanbounds {

/// Truncation policy shared by every power-series evaluation.
///
/// A sum stops once the magnitude of the latest term drops below
/// `rel_tol` times the magnitude of the partial sum, or after `max_terms`
/// terms, whichever comes first.
struct SeriesConfig {
    double rel_tol = 1e-16;
    std::size_t max_terms = 10000;

    void validate() const
    {
        detail::require(rel_tol > 0.0 && std::isfinite(rel_tol), "SeriesConfig: rel_tol must be > 0");
        detail::require(max_terms >= 1, "SeriesConfig: max_terms must be >= 1");
    }
};

/// Value of a truncated series plus how it was truncated.
struct SeriesResult {
    double value = 0.0;
    std::size_t terms = 0;
    // Set when max_terms was hit before the relative tolerance was met.
    bool truncated = false;
};

namespace detail {

// Neumaier compensated summation.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double init) : sum_(init) {}

    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace detail
} // namespace meanbounds
