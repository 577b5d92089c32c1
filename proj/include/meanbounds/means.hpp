#pragma once

#include <algorithm>
#include <cmath>

#include "meanbounds/agm.hpp"
#include "meanbounds/elliptic.hpp"
#include "meanbounds/error.hpp"

namespace meanbounds::means {

// L falls back to its arth form when |a - b| is at most this fraction of max(a, b).
inline constexpr double log_mean_switch = 1e-10;

inline double harmonic(const PositivePair& p) { return 2.0 * p.a * p.b / (p.a + p.b); }

inline double geometric(const PositivePair& p) { return std::sqrt(p.a * p.b); }

inline double arithmetic(const PositivePair& p) { return 0.5 * (p.a + p.b); }

/// Logarithmic mean L(a, b) = (a - b) / (log a - log b), positive for a != b
/// and equal to a when a = b.
///
/// Near a = b the quotient is 0/0; there L = A(a, b) y / arth(y) with
/// y = (a - b)/(a + b), which is the same function written without cancellation.
inline double logarithmic(const PositivePair& p)
{
    if (p.a == p.b)
        return p.a;
    if (std::abs(p.a - p.b) <= log_mean_switch * std::max(p.a, p.b)) {
        const double y = (p.a - p.b) / (p.a + p.b);
        return arithmetic(p) * y / elliptic::arth(y);
    }
    return (p.a - p.b) / (std::log(p.a) - std::log(p.b));
}

/// Q_{t,s}(a, b) = G(ta + (1-t)b, tb + (1-t)a)^s * A(a, b)^(1-s),
/// evaluated in log space so that large s does not overflow.
/// Requires 0 < t <= 1/2 and s >= 1; at t = 1/2 it reduces to A(a, b).
inline double q_mean(double t, double s, const PositivePair& p)
{
    meanbounds::detail::require(t > 0.0 && t <= 0.5, "q_mean: requires 0 < t <= 1/2");
    meanbounds::detail::require(s >= 1.0 && std::isfinite(s), "q_mean: requires s >= 1");
    const double mean = arithmetic(p);
    const double left = t * p.a + (1.0 - t) * p.b;
    const double right = t * p.b + (1.0 - t) * p.a;
    // s log G + (1 - s) log A = log A + s log(G/A), with G/A taken per factor
    // so that the result does not depend on the scale of (a, b).
    const double log_g_over_a = 0.5 * (std::log(left / mean) + std::log(right / mean));
    return mean * std::exp(s * log_g_over_a);
}

/// x = (a - b)/(a + b) for an ordered pair a >= b.
inline double normalized_contrast(const PositivePair& p)
{
    meanbounds::detail::require(p.a >= p.b, "normalized_contrast: requires a >= b (order the pair first)");
    return (p.a - p.b) / (p.a + p.b);
}

} // namespace meanbounds::means
