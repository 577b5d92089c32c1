#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

#include "meanbounds/elliptic.hpp"
#include "meanbounds/error.hpp"
#include "meanbounds/means.hpp"

namespace meanbounds::bounds {

/// Which mean Q_{t,s} is compared against.
enum class BoundKind { ag, l };

inline std::string_view to_string(BoundKind kind) { return kind == BoundKind::ag ? "ag" : "l"; }

inline BoundKind parse_kind(std::string_view name)
{
    if (name == "ag" || name == "AG")
        return BoundKind::ag;
    if (name == "l" || name == "L")
        return BoundKind::l;
    throw domain_error("unknown bound kind '" + std::string(name) + "' (expected ag or l)");
}

/// (t, s, kind) for the inequality Q_{t,s} > AG or Q_{t,s} > L.
struct BoundParams {
    double t;
    double s;
    BoundKind kind;

    BoundParams(double t_, double s_, BoundKind kind_) : t(t_), s(s_), kind(kind_)
    {
        meanbounds::detail::require(t > 0.0 && t <= 0.5, "BoundParams: requires 0 < t <= 1/2");
        meanbounds::detail::require(s >= 1.0 && std::isfinite(s), "BoundParams: requires s >= 1");
    }
};

/// (u, s) for the lemma functions f_{u,s} and g_{u,s}.
struct LemmaParams {
    double u;
    double s;

    LemmaParams(double u_, double s_) : u(u_), s(s_)
    {
        meanbounds::detail::require(u >= 0.0 && u <= 1.0, "LemmaParams: requires 0 <= u <= 1");
        meanbounds::detail::require(s >= 1.0 && std::isfinite(s), "LemmaParams: requires s >= 1");
    }

    /// 2su <= 1 for the AG lemma, 3su <= 2 for the L lemma.
    [[nodiscard]] bool holds_everywhere(BoundKind kind) const
    {
        return kind == BoundKind::ag ? 2.0 * s * u <= 1.0 : 3.0 * s * u <= 2.0;
    }
};

namespace detail {

inline void require_s(double s)
{
    meanbounds::detail::require(s >= 1.0 && std::isfinite(s), "threshold: requires s >= 1");
}

// 1/2 - sqrt(radicand)/denom. The subtraction cancels about one bit, so the
// rounding errors of the square root and the quotient are recovered with
// fma and subtracted as a correction term.
inline double half_minus_root_ratio(double radicand, double denom)
{
    const double root = std::sqrt(radicand);
    const double root_err = std::fma(-root, root, radicand) / (2.0 * root);
    const double ratio = root / denom;
    const double ratio_err = std::fma(-ratio, denom, root) / denom;
    return (0.5 - ratio) - (ratio_err + root_err / denom);
}

} // namespace detail

/// Least t with Q_{t,s} > AG for all a != b: 1/2 - sqrt(2s)/(4s).
inline double threshold_ag(double s)
{
    detail::require_s(s);
    return detail::half_minus_root_ratio(2.0 * s, 4.0 * s);
}

/// Least t with Q_{t,s} > L for all a != b: 1/2 - sqrt(6s)/(6s).
inline double threshold_l(double s)
{
    detail::require_s(s);
    return detail::half_minus_root_ratio(6.0 * s, 6.0 * s);
}

inline double threshold(BoundKind kind, double s)
{
    return kind == BoundKind::ag ? threshold_ag(s) : threshold_l(s);
}

/// u = (1 - 2t)^2, the weight that carries t into the lemma functions.
inline double u_of_t(double t)
{
    meanbounds::detail::require(t > 0.0 && t <= 0.5, "u_of_t: requires 0 < t <= 1/2");
    const double w = 1.0 - 2.0 * t;
    return w * w;
}

namespace detail {

inline void require_open_modulus(double x, const char* op)
{
    meanbounds::detail::require(x > 0.0 && x < 1.0, std::string(op) + ": requires 0 < x < 1");
}

inline double half_s_log_weight(double u, double s, double x) { return 0.5 * s * std::log1p(-u * x * x); }

} // namespace detail

/// f_{u,s}(x) = (s/2) log(1 - u x^2) + log(2K(x)/pi).
/// Positive on (0, 1) exactly when 2su <= 1.
inline double f_lemma(const LemmaParams& lp, double x)
{
    detail::require_open_modulus(x, "f_lemma");
    return detail::half_s_log_weight(lp.u, lp.s, x) + elliptic::log_k_ratio(x);
}

/// g_{u,s}(x) = (s/2) log(1 - u x^2) + log(arth(x)/x).
/// Positive on (0, 1) exactly when 3su <= 2.
inline double g_lemma(const LemmaParams& lp, double x)
{
    detail::require_open_modulus(x, "g_lemma");
    return detail::half_s_log_weight(lp.u, lp.s, x) + elliptic::log_arth_ratio(x);
}

/// F_{u,s}(x) = -su x^2 (1-x^2) K(x) + (1 - u x^2)[E(x) - (1-x^2) K(x)],
/// the numerator of f'_{u,s}; evaluated directly from K and E.
inline double capital_f(const LemmaParams& lp, double x)
{
    detail::require_open_modulus(x, "capital_f");
    const double x2 = x * x;
    const double one_minus_x2 = (1.0 - x) * (1.0 + x);
    const double k = elliptic::ellip_k(x);
    const double e = elliptic::ellip_e(x);
    return -lp.s * lp.u * x2 * one_minus_x2 * k + (1.0 - lp.u * x2) * (e - one_minus_x2 * k);
}

/// A_n = su(n+2)(2n + 3/2) + (n + 1/2)^2 - u(n+1)(n+2).
inline double coeff_a(std::size_t n, const LemmaParams& lp)
{
    const double m = static_cast<double>(n);
    return lp.s * lp.u * (m + 2.0) * (2.0 * m + 1.5) + (m + 0.5) * (m + 0.5) - lp.u * (m + 1.0) * (m + 2.0);
}

/// B_n = 2u(s-1)(2n+5) + 2(2n+1).
inline double coeff_b(std::size_t n, const LemmaParams& lp)
{
    const double m = static_cast<double>(n);
    return 2.0 * lp.u * (lp.s - 1.0) * (2.0 * m + 5.0) + 2.0 * (2.0 * m + 1.0);
}

inline constexpr std::size_t default_series_terms = 200;

/// F_{u,s}(x) from its power series
///   (pi/2) x^2 [1/2 - su + sum_n (1/2,n)^2 A_n / (2 (n+1)! (n+2)!) x^(2n+2)],
/// truncated after n_terms terms of the sum, or earlier once a term no
/// longer changes the bracket.
inline double series_f(const LemmaParams& lp, double x, std::size_t n_terms = default_series_terms)
{
    detail::require_open_modulus(x, "series_f");
    const double x2 = x * x;
    const double lead = 0.5 - lp.s * lp.u;
    meanbounds::detail::CompensatedSum tail;
    // c_n = (1/2,n)^2 / ((n+1)! (n+2)!), c_0 = 1/2.
    double c = 0.5;
    double power = x2;
    for (std::size_t n = 0; n < n_terms; ++n) {
        const double term = c * coeff_a(n, lp) / 2.0 * power;
        tail.add(term);
        if (term <= 1e-17 * (std::abs(lead) + tail.value()))
            break;
        const double m = static_cast<double>(n);
        c *= (m + 0.5) * (m + 0.5) / ((m + 2.0) * (m + 3.0));
        power *= x2;
    }
    return 0.5 * elliptic::pi * x2 * (lead + tail.value());
}

/// G_{u,s}(x) = -su x^2 (1-x^2) arth(x) + (1 - u x^2)[x - (1-x^2) arth(x)].
inline double capital_g(const LemmaParams& lp, double x)
{
    detail::require_open_modulus(x, "capital_g");
    const double x2 = x * x;
    const double one_minus_x2 = (1.0 - x) * (1.0 + x);
    const double at = elliptic::arth(x);
    return -lp.s * lp.u * x2 * one_minus_x2 * at + (1.0 - lp.u * x2) * (x - one_minus_x2 * at);
}

/// G_{u,s}(x) from x^3 [2/3 - su + sum_n B_n x^(2n+2) / ((2n+1)(2n+3)(2n+5))].
inline double series_g(const LemmaParams& lp, double x, std::size_t n_terms = default_series_terms)
{
    detail::require_open_modulus(x, "series_g");
    const double x2 = x * x;
    const double lead = 2.0 / 3.0 - lp.s * lp.u;
    meanbounds::detail::CompensatedSum tail;
    double power = x2;
    for (std::size_t n = 0; n < n_terms; ++n) {
        const double m = static_cast<double>(n);
        const double term = coeff_b(n, lp) * power / ((2.0 * m + 1.0) * (2.0 * m + 3.0) * (2.0 * m + 5.0));
        tail.add(term);
        if (term <= 1e-17 * (std::abs(lead) + tail.value()))
            break;
        power *= x2;
    }
    return x2 * x * (lead + tail.value());
}

/// log(Q_{t,s}(a,b) / AG(a,b)) at contrast x = (a-b)/(a+b):
///   (s/2) log(1 - (1-2t)^2 x^2) - log(pi / (2K(x))).
inline double log_ratio_ag(const BoundParams& bp, double x)
{
    meanbounds::detail::require(bp.kind == BoundKind::ag, "log_ratio_ag: requires kind = ag");
    detail::require_open_modulus(x, "log_ratio_ag");
    return detail::half_s_log_weight(u_of_t(bp.t), bp.s, x) + elliptic::log_k_ratio(x);
}

/// log(Q_{t,s}(a,b) / L(a,b)) at contrast x:
///   (s/2) log(1 - (1-2t)^2 x^2) + log(arth(x)/x).
inline double log_ratio_l(const BoundParams& bp, double x)
{
    meanbounds::detail::require(bp.kind == BoundKind::l, "log_ratio_l: requires kind = l");
    detail::require_open_modulus(x, "log_ratio_l");
    return detail::half_s_log_weight(u_of_t(bp.t), bp.s, x) + elliptic::log_arth_ratio(x);
}

inline double log_ratio(const BoundParams& bp, double x)
{
    return bp.kind == BoundKind::ag ? log_ratio_ag(bp, x) : log_ratio_l(bp, x);
}

/// The mean Q_{t,s} is compared against: AG(a,b) or L(a,b).
inline double reference_mean(BoundKind kind, const means::PositivePair& p)
{
    return kind == BoundKind::ag ? means::agm(p).value : means::logarithmic(p);
}

/// log(Q_{t,s}(a,b) / M(a,b)) straight from the mean definitions, with no
/// change of variables.
inline double direct_log_ratio(const BoundParams& bp, const means::PositivePair& p)
{
    return std::log(means::q_mean(bp.t, bp.s, p) / reference_mean(bp.kind, p));
}

} // namespace meanbounds::bounds
