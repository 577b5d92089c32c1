#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "meanbounds/bounds.hpp"
#include "meanbounds/elliptic.hpp"
#include "meanbounds/error.hpp"
#include "meanbounds/means.hpp"

namespace meanbounds::verify {

using bounds::BoundKind;
using bounds::BoundParams;
using bounds::LemmaParams;
using means::PositivePair;

/// A strict inequality "v > 0" is accepted as v > -strictness_tol, which
/// absorbs rounding where the true value vanishes (x -> 0).
inline constexpr double strictness_tol = 1e-13;

/// Distance below the sharp threshold at which failure must be detectable.
inline constexpr double detectable_margin = 0.01;

inline std::vector<double> default_x_grid()
{
    std::vector<double> grid;
    grid.reserve(99);
    for (int i = 1; i <= 99; ++i)
        grid.push_back(i / 100.0);
    return grid;
}

/// How a verification run draws its points.
///
/// Random pairs are (1, exp(U)) with U uniform on [-ratio_log_range,
/// ratio_log_range]; homogeneity makes one free scale sufficient.
struct SampleSpec {
    std::size_t n = 1000;
    std::uint64_t seed = 42;
    double ratio_log_range = 7.0;
    std::vector<double> x_grid = default_x_grid();

    void validate() const
    {
        meanbounds::detail::require(n >= 1, "SampleSpec: n must be >= 1");
        meanbounds::detail::require(ratio_log_range > 0.0 && std::isfinite(ratio_log_range),
                                    "SampleSpec: ratio_log_range must be > 0");
        meanbounds::detail::require(!x_grid.empty(), "SampleSpec: x_grid must be nonempty");
        for (double x : x_grid)
            meanbounds::detail::require(x > 0.0 && x < 1.0, "SampleSpec: x_grid points must lie in (0, 1)");
    }
};

/// A point that violates (or, for sharpness legs, witnesses the failure of)
/// an inequality. Fields that do not apply to a suite are NaN.
///
/// `lhs`/`rhs` are Q_{t,s} and the compared mean at (a, b) computed from the
/// mean definitions; `margin` = log(lhs/rhs) on that route, while `value`
/// is the quantity the suite tested.
struct Counterexample {
    double t = std::numeric_limits<double>::quiet_NaN();
    double s = std::numeric_limits<double>::quiet_NaN();
    double x = std::numeric_limits<double>::quiet_NaN();
    double a = std::numeric_limits<double>::quiet_NaN();
    double b = std::numeric_limits<double>::quiet_NaN();
    double value = std::numeric_limits<double>::quiet_NaN();
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    double margin = std::numeric_limits<double>::quiet_NaN();
};

/// Outcome of one suite.
///
/// passes + failures = samples, and `counterexample` is set iff failures > 0
/// (it is the failing sample with the smallest margin). Sharpness suites
/// additionally count `witnesses`: points below a threshold where the
/// inequality was expected to fail and did. These are not failures.
struct VerifyReport {
    std::string suite;
    std::size_t samples = 0;
    std::size_t passes = 0;
    std::size_t failures = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::optional<Counterexample> counterexample;
    std::uint64_t seed = 0;
    std::size_t witnesses = 0;
    std::optional<Counterexample> witness;

    [[nodiscard]] bool ok() const { return failures == 0; }
};

/// One evaluated sample, for per-sample CSV output.
struct SampleRecord {
    std::string_view suite{};
    std::size_t index = 0;
    double a = std::numeric_limits<double>::quiet_NaN();
    double b = std::numeric_limits<double>::quiet_NaN();
    double t = std::numeric_limits<double>::quiet_NaN();
    double s = std::numeric_limits<double>::quiet_NaN();
    double x = std::numeric_limits<double>::quiet_NaN();
    double value = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
};

using SampleSink = std::function<void(const SampleRecord&)>;

inline constexpr std::array<std::string_view, 12> suite_names = {
    "mean_chain", "eq_1_6", "l_ag_sandwich", "gaussian_identity",    "landen",   "dkdr",
    "lemma21",    "lemma22", "coeffs",       "reduction_identities", "theorem11", "theorem12"};

inline bool is_suite(std::string_view name)
{
    for (auto n : suite_names)
        if (n == name)
            return true;
    return false;
}

/// Raised for an unknown suite name.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

// Deterministic on every platform: uses the raw mt19937_64 stream rather
// than std::uniform_real_distribution, whose output is library-defined.
class PairSampler {
public:
    PairSampler(std::uint64_t seed, double range) : engine_(seed), range_(range) {}

    PositivePair next()
    {
        const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double u = (2.0 * unit - 1.0) * range_;
        return {1.0, std::exp(u)};
    }

private:
    std::mt19937_64 engine_;
    double range_;
};

inline std::vector<PositivePair> sample_pairs(const SampleSpec& spec)
{
    PairSampler sampler(spec.seed, spec.ratio_log_range);
    std::vector<PositivePair> pairs;
    pairs.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i)
        pairs.push_back(sampler.next());
    return pairs;
}

// Accumulates samples into a report. Aggregation keeps only counts and
// minima (ties broken by index), so the result does not depend on the
// order in which samples are recorded.
class Tally {
public:
    Tally(std::string_view suite, std::uint64_t seed, const SampleSink* sink) : sink_(sink)
    {
        report_.suite = std::string(suite);
        report_.seed = seed;
    }

    void record(SampleRecord rec, double margin, const Counterexample& where)
    {
        rec.suite = report_.suite;
        rec.index = report_.samples;
        ++report_.samples;
        if (rec.pass)
            ++report_.passes;
        else
            ++report_.failures;
        if (margin < report_.worst_margin || std::isnan(margin))
            report_.worst_margin = margin;
        if (!rec.pass && (!report_.counterexample || margin < worst_failure_))
        {
            report_.counterexample = where;
            worst_failure_ = margin;
        }
        if (sink_ && *sink_)
            (*sink_)(rec);
    }

    void witness(const Counterexample& where)
    {
        ++report_.witnesses;
        if (!report_.witness)
            report_.witness = where;
    }

    VerifyReport finish() && { return std::move(report_); }

private:
    VerifyReport report_;
    double worst_failure_ = std::numeric_limits<double>::infinity();
    const SampleSink* sink_;
};

inline Counterexample pair_point(const PositivePair& p, double value)
{
    Counterexample c;
    c.a = p.a;
    c.b = p.b;
    c.value = value;
    return c;
}

inline double min_of(std::initializer_list<double> values)
{
    double m = std::numeric_limits<double>::infinity();
    for (double v : values)
        m = std::min(m, v);
    return m;
}

// Evaluates a bound at contrast x and fills in both coordinates plus the
// direct-route comparison.
inline Counterexample bound_point(const BoundParams& bp, double x, double value)
{
    const PositivePair p{1.0 + x, 1.0 - x};
    Counterexample c;
    c.t = bp.t;
    c.s = bp.s;
    c.x = x;
    c.a = p.a;
    c.b = p.b;
    c.value = value;
    c.lhs = means::q_mean(bp.t, bp.s, p);
    c.rhs = bounds::reference_mean(bp.kind, p);
    c.margin = std::log(c.lhs / c.rhs);
    return c;
}

// x = 10^(-k/4) for k = 4..24: the neighbourhood of 0 where super-threshold
// parameters are guaranteed to fail, scanned from the outside in.
inline std::vector<double> small_x_scan()
{
    std::vector<double> xs;
    for (int k = 4; k <= 24; ++k)
        xs.push_back(std::pow(10.0, -k / 4.0));
    return xs;
}

// First x, small-x scan first, then the default grid, at which fn(x) < 0.
// Also reports the smallest value seen.
template <class Fn>
std::optional<double> first_negative(Fn&& fn, double& min_seen)
{
    min_seen = std::numeric_limits<double>::infinity();
    for (const auto& xs : {small_x_scan(), default_x_grid()}) {
        for (double x : xs) {
            const double v = fn(x);
            min_seen = std::min(min_seen, v);
            if (v < 0.0)
                return x;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Scans for a point where Q_{t,s} fails to exceed the compared mean.
///
/// Looks at x = 10^(-k/4), k = 4..24, then at x = 0.01..0.99, and returns
/// the first x with a negative log-ratio, mapped to (a, b) = (1+x, 1-x).
/// Finds one whenever t <= threshold - 0.01; finds none when t >= threshold.
inline std::optional<Counterexample> search_counterexample(const BoundParams& bp)
{
    double min_seen = 0.0;
    const auto x = detail::first_negative([&bp](double v) { return bounds::log_ratio(bp, v); }, min_seen);
    if (!x)
        return std::nullopt;
    return detail::bound_point(bp, *x, bounds::log_ratio(bp, *x));
}

/// Evaluates Q_{t,s} > M over the x grid (reduced route) and over the random
/// pairs (direct route). Failures are data: the whole sample is always run.
inline VerifyReport check_inequality(const BoundParams& bp, const SampleSpec& spec,
                                     const SampleSink* sink = nullptr, std::string_view suite = {})
{
    spec.validate();
    const std::string name = suite.empty()
        ? std::string("check_") + std::string(bounds::to_string(bp.kind))
        : std::string(suite);
    detail::Tally tally(name, spec.seed, sink);
    for (double x : spec.x_grid) {
        const double v = bounds::log_ratio(bp, x);
        SampleRecord rec;
        rec.t = bp.t;
        rec.s = bp.s;
        rec.x = x;
        rec.a = 1.0 + x;
        rec.b = 1.0 - x;
        rec.value = v;
        rec.pass = v > -strictness_tol;
        tally.record(rec, v, detail::bound_point(bp, x, v));
    }
    for (const auto& pair : detail::sample_pairs(spec)) {
        const double v = bounds::direct_log_ratio(bp, pair);
        const auto ordered = pair.ordered();
        SampleRecord rec;
        rec.t = bp.t;
        rec.s = bp.s;
        rec.a = pair.a;
        rec.b = pair.b;
        rec.x = means::normalized_contrast(ordered);
        rec.value = v;
        rec.pass = v > -strictness_tol;
        Counterexample c;
        if (!rec.pass) {
            c = detail::bound_point(bp, rec.x, v);
            c.a = pair.a;
            c.b = pair.b;
            c.lhs = means::q_mean(bp.t, bp.s, pair);
            c.rhs = bounds::reference_mean(bp.kind, pair);
            c.margin = v;
        }
        tally.record(rec, v, c);
    }
    return std::move(tally).finish();
}

namespace detail {

inline void mean_chain(const SampleSpec& spec, Tally& tally)
{
    for (const auto& p : sample_pairs(spec)) {
        const double h = means::harmonic(p);
        const double g = means::geometric(p);
        const double l = means::logarithmic(p);
        const double a = means::arithmetic(p);
        const double margin = min_of({g - h, l - g, a - l}) / a;
        tally.record({.a = p.a, .b = p.b, .value = margin, .pass = margin > 0.0}, margin, pair_point(p, margin));
    }
}

inline void eq_1_6(const SampleSpec& spec, Tally& tally)
{
    for (const auto& p : sample_pairs(spec)) {
        const double g = means::geometric(p);
        const double a = means::arithmetic(p);
        const double root_ag = std::sqrt(a * g);
        const double ag = means::agm(p).value;
        const double margin = min_of({root_ag - g, ag - root_ag, a - ag}) / a;
        tally.record({.a = p.a, .b = p.b, .value = margin, .pass = margin > 0.0}, margin, pair_point(p, margin));
    }
}

inline void l_ag_sandwich(const SampleSpec& spec, Tally& tally)
{
    for (const auto& p : sample_pairs(spec)) {
        const double l = means::logarithmic(p);
        const double ag = means::agm(p).value;
        const double margin = min_of({ag - l, 0.5 * elliptic::pi * l - ag}) / means::arithmetic(p);
        tally.record({.a = p.a, .b = p.b, .value = margin, .pass = margin > 0.0}, margin, pair_point(p, margin));
    }
}

// 50 equispaced interior points of (0, 1).
inline double unit_grid(int i) { return i / 51.0; }

inline constexpr double identity_tol = 1e-12;
inline constexpr double dkdr_tol = 1e-6;
inline constexpr double dkdr_step = 1e-6;

inline void gaussian_identity(Tally& tally)
{
    for (int i = 1; i <= 50; ++i) {
        const double r = unit_grid(i);
        const double k = elliptic::ellip_k(std::sqrt((1.0 - r) * (1.0 + r)));
        const double residual = std::abs(means::agm({1.0, r}).value * k - 0.5 * elliptic::pi);
        const double margin = identity_tol - residual;
        Counterexample c;
        c.x = r;
        c.value = residual;
        tally.record({.x = r, .value = residual, .pass = margin >= 0.0}, margin, c);
    }
}

inline void landen(Tally& tally)
{
    for (int i = 1; i <= 50; ++i) {
        const double r = unit_grid(i);
        const auto [lhs, rhs] = elliptic::landen_pair(r);
        const double residual = std::abs(lhs - rhs) / rhs;
        const double margin = identity_tol - residual;
        Counterexample c;
        c.x = r;
        c.value = residual;
        c.lhs = lhs;
        c.rhs = rhs;
        tally.record({.x = r, .value = residual, .pass = margin >= 0.0}, margin, c);
    }
}

inline void dkdr(Tally& tally)
{
    for (int i = 0; i < 50; ++i) {
        const double x = 0.01 + i * (0.95 - 0.01) / 49.0;
        const double analytic = elliptic::dk_dr(x);
        const double fd =
            (elliptic::ellip_k(x + dkdr_step) - elliptic::ellip_k(x - dkdr_step)) / (2.0 * dkdr_step);
        const double rel = std::abs(analytic - fd) / analytic;
        const double margin = dkdr_tol - rel;
        Counterexample c;
        c.x = x;
        c.value = rel;
        c.lhs = analytic;
        c.rhs = fd;
        tally.record({.x = x, .value = rel, .pass = margin >= 0.0}, margin, c);
    }
}

inline constexpr std::array<double, 7> lemma_s_grid = {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0};

// u = 0, 0.05, ..., 1.
inline double lemma_u(int i) { return i / 20.0; }

// Both directions of a lemma: positive on the grid when the parameter
// product is at or below its bound, negative somewhere near 0 once it
// exceeds the bound by at least 1%.
template <class Fn>
void lemma_suite(BoundKind kind, const SampleSpec& spec, Tally& tally, Fn&& fn)
{
    const double bound = kind == BoundKind::ag ? 1.0 : 2.0;
    const double factor = kind == BoundKind::ag ? 2.0 : 3.0;
    for (double s : lemma_s_grid) {
        for (int i = 0; i <= 20; ++i) {
            const LemmaParams lp(lemma_u(i), s);
            const double product = factor * lp.s * lp.u;
            if (lp.holds_everywhere(kind)) {
                for (double x : spec.x_grid) {
                    const double v = fn(lp, x);
                    Counterexample c;
                    c.s = lp.s;
                    c.x = x;
                    c.value = v;
                    tally.record({.s = lp.s, .x = x, .value = v, .pass = v > -strictness_tol}, v, c);
                }
            } else if (product >= bound * (1.0 + detectable_margin)) {
                double min_seen = 0.0;
                const auto x = first_negative([&](double v) { return fn(lp, v); }, min_seen);
                Counterexample c;
                c.s = lp.s;
                if (x) {
                    c.x = *x;
                    c.value = fn(lp, *x);
                    tally.witness(c);
                }
                const double margin = -min_seen;
                c.value = x ? c.value : min_seen;
                tally.record({.s = lp.s, .x = c.x, .value = c.value, .pass = x.has_value()}, margin, c);
            }
        }
    }
}

inline constexpr std::size_t coeff_max_n = 10000;
inline constexpr std::array<double, 4> coeff_s_grid = {1.0, 1.5, 2.0, 10.0};

inline void coeffs(Tally& tally)
{
    for (double s : coeff_s_grid) {
        for (int i = 0; i <= 20; ++i) {
            const LemmaParams lp(lemma_u(i), s);
            for (std::size_t n = 0; n <= coeff_max_n; ++n) {
                for (double v : {bounds::coeff_a(n, lp), bounds::coeff_b(n, lp)}) {
                    Counterexample c;
                    c.s = s;
                    c.x = static_cast<double>(n);
                    c.value = v;
                    tally.record({.s = s, .x = static_cast<double>(n), .value = v, .pass = v > 0.0}, v, c);
                }
            }
        }
    }
}

inline constexpr double reduction_tol = 1e-13;
inline constexpr double series_tol = 1e-10;
inline constexpr double direct_tol = 1e-11;
inline constexpr std::array<double, 5> theorem_s_grid = {1.0, 1.5, 2.0, 5.0, 10.0};
inline constexpr std::array<double, 4> series_x_points = {0.1, 0.3, 0.5, 0.7};

inline double rel_diff(double got, double want)
{
    if (got == want)
        return 0.0;
    return std::abs(got - want) / std::abs(want);
}

inline void reduction_identities(const SampleSpec& spec, Tally& tally)
{
    auto check = [&tally](double rel, double tol, double t, double s, double x) {
        const double margin = tol - rel;
        Counterexample c;
        c.t = t;
        c.s = s;
        c.x = x;
        c.value = rel;
        tally.record({.t = t, .s = s, .x = x, .value = rel, .pass = margin >= 0.0}, margin, c);
    };

    for (double s : theorem_s_grid) {
        for (BoundKind kind : {BoundKind::ag, BoundKind::l}) {
            const double thr = bounds::threshold(kind, s);
            for (double t : {thr - detectable_margin, thr, 0.5 * (thr + 0.5), 0.5}) {
                const BoundParams bp(t, s, kind);
                const LemmaParams lp(bounds::u_of_t(t), s);
                for (double x : spec.x_grid) {
                    const double reduced = bounds::log_ratio(bp, x);
                    const double lemma = kind == BoundKind::ag ? bounds::f_lemma(lp, x) : bounds::g_lemma(lp, x);
                    check(rel_diff(reduced, lemma), reduction_tol, t, s, x);

                    const PositivePair p{1.0 + x, 1.0 - x};
                    const double direct = means::q_mean(t, s, p) / bounds::reference_mean(kind, p);
                    check(rel_diff(std::exp(reduced), direct), direct_tol, t, s, x);
                }
            }
        }
    }

    for (double s : theorem_s_grid) {
        for (int i = 0; i <= 20; ++i) {
            const LemmaParams lp(lemma_u(i), s);
            for (double x : series_x_points) {
                check(rel_diff(bounds::capital_f(lp, x), bounds::series_f(lp, x)), series_tol, lp.u, s, x);
                check(rel_diff(bounds::capital_g(lp, x), bounds::series_g(lp, x)), series_tol, lp.u, s, x);
            }
        }
    }
}

// At the threshold: the full check_inequality sample must pass. Just below
// it: the searcher must produce a witness that is negative on the direct
// route as well as the reduced one.
inline void theorem(BoundKind kind, const SampleSpec& spec, Tally& tally)
{
    for (double s : theorem_s_grid) {
        const double thr = bounds::threshold(kind, s);
        for (const auto& x : spec.x_grid) {
            const double v = bounds::log_ratio(BoundParams(thr, s, kind), x);
            tally.record({.a = 1.0 + x, .b = 1.0 - x, .t = thr, .s = s, .x = x, .value = v, .pass = v > -strictness_tol},
                         v, bound_point(BoundParams(thr, s, kind), x, v));
        }
        for (const auto& pair : sample_pairs(spec)) {
            const BoundParams bp(thr, s, kind);
            const double v = bounds::direct_log_ratio(bp, pair);
            auto c = bound_point(bp, means::normalized_contrast(pair.ordered()), v);
            c.a = pair.a;
            c.b = pair.b;
            tally.record({.a = pair.a, .b = pair.b, .t = thr, .s = s, .value = v, .pass = v > -strictness_tol}, v, c);
        }

        const BoundParams below(thr - detectable_margin, s, kind);
        const auto found = search_counterexample(below);
        const bool confirmed = found && found->value < 0.0 && found->margin < 0.0;
        if (confirmed)
            tally.witness(*found);
        const double margin = found ? -std::max(found->value, found->margin) : -1.0;
        Counterexample c = found ? *found : Counterexample{};
        c.t = below.t;
        c.s = s;
        tally.record({.t = below.t, .s = s, .x = c.x, .value = c.value, .pass = confirmed}, margin, c);
    }
}

} // namespace detail

/// Runs one named invariant suite. Deterministic for a given spec.
inline VerifyReport run_suite(std::string_view name, const SampleSpec& spec, const SampleSink* sink = nullptr)
{
    if (!is_suite(name))
        throw usage_error("unknown suite '" + std::string(name) + "'");
    spec.validate();
    detail::Tally tally(name, spec.seed, sink);
    if (name == "mean_chain")
        detail::mean_chain(spec, tally);
    else if (name == "eq_1_6")
        detail::eq_1_6(spec, tally);
    else if (name == "l_ag_sandwich")
        detail::l_ag_sandwich(spec, tally);
    else if (name == "gaussian_identity")
        detail::gaussian_identity(tally);
    else if (name == "landen")
        detail::landen(tally);
    else if (name == "dkdr")
        detail::dkdr(tally);
    else if (name == "lemma21")
        detail::lemma_suite(BoundKind::ag, spec, tally, [](const LemmaParams& lp, double x) { return bounds::f_lemma(lp, x); });
    else if (name == "lemma22")
        detail::lemma_suite(BoundKind::l, spec, tally, [](const LemmaParams& lp, double x) { return bounds::g_lemma(lp, x); });
    else if (name == "coeffs")
        detail::coeffs(tally);
    else if (name == "reduction_identities")
        detail::reduction_identities(spec, tally);
    else if (name == "theorem11")
        detail::theorem(BoundKind::ag, spec, tally);
    else
        detail::theorem(BoundKind::l, spec, tally);
    return std::move(tally).finish();
}

struct SharpnessRow {
    double s;
    double threshold;
    bool holds_at_threshold;
    bool fails_below;
};

/// For each s: does the inequality hold at the threshold (full sample and
/// searcher both clean), and does it fail at threshold - delta?
inline std::vector<SharpnessRow> sharpness_scan(BoundKind kind, const std::vector<double>& s_values, double delta,
                                                const SampleSpec& spec = {})
{
    meanbounds::detail::require(delta >= detectable_margin, "sharpness_scan: requires delta >= 0.01");
    std::vector<SharpnessRow> rows;
    rows.reserve(s_values.size());
    for (double s : s_values) {
        const double thr = bounds::threshold(kind, s);
        const BoundParams at(thr, s, kind);
        const bool holds = check_inequality(at, spec).ok() && !search_counterexample(at);
        meanbounds::detail::require(thr - delta > 0.0, "sharpness_scan: threshold - delta must be > 0");
        const bool fails = search_counterexample(BoundParams(thr - delta, s, kind)).has_value();
        rows.push_back({s, thr, holds, fails});
    }
    return rows;
}

} // namespace meanbounds::verify
