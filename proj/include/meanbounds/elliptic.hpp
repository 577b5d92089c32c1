#pragma once

#include <cmath>
#include <numbers>

#include "meanbounds/agm.hpp"
#include "meanbounds/error.hpp"
#include "meanbounds/series.hpp"

namespace meanbounds::elliptic {

inline constexpr double pi = std::numbers::pi;

// Below this modulus the public E uses its hypergeometric series; above it
// the series needs more than max_terms terms near x = 1, so the AGM route
// takes over.
inline constexpr double ellip_e_series_limit = 0.99;

// arth switches to its odd Taylor polynomial below this magnitude.
inline constexpr double arth_series_limit = 1e-4;

/// Gaussian hypergeometric series 2F1(a, b; c; x) for |x| < 1.
///
/// Terms follow the shifted-factorial recurrence
/// t_{n+1} = t_n (a+n)(b+n) / ((c+n)(n+1)) x, starting from t_0 = 1.
/// The result records whether the term cap was hit before convergence.
inline SeriesResult hyp2f1(double a, double b, double c, double x, const SeriesConfig& cfg = {})
{
    cfg.validate();
    meanbounds::detail::require(!(c <= 0.0 && c == std::floor(c)), "hyp2f1: c must not be a nonpositive integer");
    meanbounds::detail::require(std::abs(x) < 1.0, "hyp2f1: requires |x| < 1");

    meanbounds::detail::CompensatedSum sum(1.0);
    double term = 1.0;
    SeriesResult out;
    out.terms = 1;
    for (;;) {
        if (out.terms >= cfg.max_terms) {
            out.truncated = true;
            break;
        }
        const double n = static_cast<double>(out.terms - 1);
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        if (term == 0.0)
            break;
        sum.add(term);
        ++out.terms;
        if (std::abs(term) < cfg.rel_tol * std::abs(sum.value()))
            break;
    }
    out.value = sum.value();
    return out;
}

namespace detail {

// sqrt(1 - x^2) without forming 1 - x^2 directly.
inline double complementary(double x) { return std::sqrt((1.0 - x) * (1.0 + x)); }

} // namespace detail

/// K(x) from its hypergeometric series, (pi/2) F(1/2, 1/2; 1; x^2).
/// Converges slowly as x -> 1; kept as an independent path for cross-checks.
inline double ellip_k_series(double x, const SeriesConfig& cfg = {})
{
    meanbounds::detail::require(x >= 0.0 && x < 1.0, "ellip_k: requires 0 <= x < 1");
    return 0.5 * pi * hyp2f1(0.5, 0.5, 1.0, x * x, cfg).value;
}

namespace detail {

// K from the complementary modulus sqrt(1 - x^2), for callers that know it
// more accurately than x itself.
inline double ellip_k_from_complement(double complement)
{
    return pi / (2.0 * means::detail::agm_value(1.0, complement));
}

} // namespace detail

/// K(x) = pi / (2 AG(1, sqrt(1 - x^2))).
inline double ellip_k_agm(double x)
{
    meanbounds::detail::require(x >= 0.0 && x < 1.0, "ellip_k: requires 0 <= x < 1");
    return detail::ellip_k_from_complement(detail::complementary(x));
}

/// Complete elliptic integral of the first kind. Uses the AGM path, which
/// converges quadratically on all of [0, 1); the config is accepted for
/// interface symmetry with the series path.
inline double ellip_k(double x, const SeriesConfig& cfg = {})
{
    cfg.validate();
    return ellip_k_agm(x);
}

/// E(x) from its hypergeometric series, (pi/2) F(-1/2, 1/2; 1; x^2).
inline double ellip_e_series(double x, const SeriesConfig& cfg = {})
{
    meanbounds::detail::require(x >= 0.0 && x < 1.0, "ellip_e_series: requires 0 <= x < 1");
    return 0.5 * pi * hyp2f1(-0.5, 0.5, 1.0, x * x, cfg).value;
}

/// E(x) by the Gauss-Legendre AGM scheme, E = K (1 - sum 2^(n-1) c_n^2)
/// with c_0 = x and c_{n+1} = (a_n - b_n)/2.
inline double ellip_e_agm(double x)
{
    meanbounds::detail::require(x >= 0.0 && x <= 1.0, "ellip_e: requires 0 <= x <= 1");
    if (x == 1.0)
        return 1.0;
    double a = 1.0;
    double b = detail::complementary(x);
    double weight = 0.5;
    meanbounds::detail::CompensatedSum deficit(weight * x * x);
    for (std::size_t i = 0; i < means::agm_max_iterations; ++i) {
        const double c = 0.5 * (a - b);
        if (c <= 1e-17 * a)
            break;
        const double next_a = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next_a;
        weight *= 2.0;
        deficit.add(weight * c * c);
    }
    return pi / (2.0 * 0.5 * (a + b)) * (1.0 - deficit.value());
}

/// Complete elliptic integral of the second kind on 0 <= x <= 1, E(1) = 1.
inline double ellip_e(double x, const SeriesConfig& cfg = {})
{
    cfg.validate();
    meanbounds::detail::require(x >= 0.0 && x <= 1.0, "ellip_e: requires 0 <= x <= 1");
    if (x == 1.0)
        return 1.0;
    if (x <= ellip_e_series_limit)
        return ellip_e_series(x, cfg);
    return ellip_e_agm(x);
}

/// dK/dx = (E - (1 - x^2) K) / (x (1 - x^2)). Returns the limit 0 at x = 0.
/// For x <= 1/2 evaluated as (pi x / 4) F(3/2, 3/2; 2; x^2).
inline double dk_dr(double x)
{
    meanbounds::detail::require(x >= 0.0 && x < 1.0, "dk_dr: requires 0 <= x < 1");
    if (x == 0.0)
        return 0.0;
    // Below 1/2 the numerator cancels to O(x^2); differentiate the series instead.
    if (x <= 0.5)
        return 0.25 * pi * x * hyp2f1(1.5, 1.5, 2.0, x * x).value;
    const double one_minus_x2 = (1.0 - x) * (1.0 + x);
    return (ellip_e(x) - one_minus_x2 * ellip_k(x)) / (x * one_minus_x2);
}

struct LandenPair {
    double lhs;  // K(2 sqrt(r) / (1 + r))
    double rhs;  // (1 + r) K(r)
};

/// Both sides of the Landen transformation K(2 sqrt(r)/(1+r)) = (1+r) K(r).
inline LandenPair landen_pair(double r)
{
    meanbounds::detail::require(r > 0.0 && r < 1.0, "landen_pair: requires 0 < r < 1");
    // The complement of 2 sqrt(r)/(1+r) is exactly (1-r)/(1+r).
    return {detail::ellip_k_from_complement((1.0 - r) / (1.0 + r)), (1.0 + r) * ellip_k(r)};
}

/// Inverse hyperbolic tangent, (1/2) log((1+x)/(1-x)), exactly odd.
inline double arth(double x)
{
    meanbounds::detail::require(std::abs(x) < 1.0, "arth: requires |x| < 1");
    const double ax = std::abs(x);
    double v;
    if (ax < arth_series_limit) {
        const double x2 = ax * ax;
        v = ax * (1.0 + x2 * (1.0 / 3.0 + x2 / 5.0));
    } else {
        v = std::atanh(ax);
    }
    return std::copysign(v, x);
}

// The lemma functions subtract quantities that are each 1 + O(x^2); these
// return the excess over 1 with full relative accuracy for small x.

/// 2K(x)/pi - 1.
inline double k_excess(double x)
{
    meanbounds::detail::require(x >= 0.0 && x < 1.0, "k_excess: requires 0 <= x < 1");
    if (x == 0.0)
        return 0.0;
    if (x > 0.5)
        return 2.0 * ellip_k(x) / pi - 1.0;
    const double x2 = x * x;
    meanbounds::detail::CompensatedSum sum;
    double term = 1.0;
    for (int n = 1; n < 200; ++n) {
        const double r = (n - 0.5) / n;
        term *= r * r * x2;
        sum.add(term);
        if (term < 1e-18 * sum.value())
            break;
    }
    return sum.value();
}

/// arth(x)/x - 1 = x^2/3 + x^4/5 + ...
inline double arth_excess(double x)
{
    meanbounds::detail::require(x > 0.0 && x < 1.0, "arth_excess: requires 0 < x < 1");
    if (x > 0.5)
        return arth(x) / x - 1.0;
    const double x2 = x * x;
    meanbounds::detail::CompensatedSum sum;
    double power = 1.0;
    for (int n = 1; n < 200; ++n) {
        power *= x2;
        const double term = power / (2 * n + 1);
        sum.add(term);
        if (term < 1e-18 * sum.value())
            break;
    }
    return sum.value();
}

/// log(2K(x)/pi).
inline double log_k_ratio(double x) { return std::log1p(k_excess(x)); }

/// log(arth(x)/x).
inline double log_arth_ratio(double x) { return std::log1p(arth_excess(x)); }

} // namespace meanbounds::elliptic
