// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. The checks evaluate library functions directly rather than
// through the verify suites, so a bug in the harness cannot hide a failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "meanbounds/cli.hpp"
#include "meanbounds/meanbounds.hpp"

namespace {

using namespace meanbounds;
using bounds::BoundKind;
using bounds::BoundParams;
using means::PositivePair;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

constexpr double half_pi = 1.5707963267948966;
constexpr double s_set[] = {1.0, 1.5, 2.0, 5.0, 10.0};

// 200 log-spaced points on [1e-4, 1e-2) then a linear grid on [1e-2, 0.9999].
std::vector<double> acceptance_x_grid()
{
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i)
        xs.push_back(std::pow(10.0, -4.0 + 2.0 * i / 200.0));
    for (int i = 100; i <= 9999; ++i)
        xs.push_back(i / 10000.0);
    return xs;
}

Outcome thresholds()
{
    const double err = std::max({std::abs(bounds::threshold_ag(1) - (0.5 - std::sqrt(2.0) / 4.0)),
                                 std::abs(bounds::threshold_ag(2) - 0.25),
                                 std::abs(bounds::threshold_l(1) - (0.5 - std::sqrt(6.0) / 6.0)),
                                 std::abs(bounds::threshold_l(2) - (0.5 - std::sqrt(3.0) / 6.0))});
    return {err <= 1e-15, "max abs error " + fmt(err)};
}

Outcome gaussian_identity()
{
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double r = i / 51.0;
        const double ag = means::agm({1.0, r}).value;
        worst = std::max(worst, std::abs(ag * elliptic::ellip_k(std::sqrt((1 - r) * (1 + r))) - half_pi));
    }
    return {worst <= 1e-12, "max residual " + fmt(worst)};
}

Outcome landen()
{
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const auto [lhs, rhs] = elliptic::landen_pair(i / 51.0);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    return {worst <= 1e-12, "max relative residual " + fmt(worst)};
}

Outcome dkdr()
{
    double worst = 0.0;
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const double x = 0.01 + 0.94 * i / 49.0;
        const double fd = (elliptic::ellip_k(x + h) - elliptic::ellip_k(x - h)) / (2 * h);
        const double d = elliptic::dk_dr(x);
        worst = std::max(worst, std::abs(d - fd) / d);
    }
    return {worst <= 1e-6, "max relative difference " + fmt(worst)};
}

Outcome k_paths()
{
    double worst = 0.0;
    for (int i = 1; i <= 99; ++i) {
        const double x = i / 100.0;
        const double agm = elliptic::ellip_k_agm(x);
        worst = std::max(worst, std::abs(elliptic::ellip_k_series(x) - agm) / agm);
    }
    return {worst <= 1e-12, "max relative difference " + fmt(worst)};
}

Outcome mean_chains()
{
    verify::SampleSpec spec;
    int violations = 0;
    int unequal = 0;
    for (const auto& p : verify::detail::sample_pairs(spec)) {
        if (p.a == p.b)
            continue;
        ++unequal;
        const double h = means::harmonic(p), g = means::geometric(p), l = means::logarithmic(p);
        const double a = means::arithmetic(p), ag = means::agm(p).value, root = std::sqrt(a * g);
        const bool ok = h < g && g < l && l < a && g < root && root < ag && ag < a && l < ag && ag < half_pi * l;
        violations += !ok;
    }
    return {violations == 0 && unequal >= 990,
            std::to_string(unequal) + " pairs, " + std::to_string(violations) + " violations"};
}

Outcome if_direction(BoundKind kind)
{
    const auto xs = acceptance_x_grid();
    int violations = 0;
    double worst = INFINITY;
    for (double s : s_set) {
        const BoundParams bp(bounds::threshold(kind, s), s, kind);
        for (double x : xs) {
            const double v = bounds::log_ratio(bp, x);
            worst = std::min(worst, v);
            if (!(v > -1e-13) || (x >= 1e-2 && !(v > 0.0)))
                ++violations;
        }
    }
    return {violations == 0, std::to_string(xs.size() * 5) + " points, " + std::to_string(violations) +
                                 " violations, min " + fmt(worst)};
}

Outcome only_if_direction(BoundKind kind)
{
    int missing = 0;
    int unsound = 0;
    double worst_margin = -INFINITY;
    for (double s : s_set) {
        const BoundParams bp(bounds::threshold(kind, s) - 0.01, s, kind);
        const auto c = verify::search_counterexample(bp);
        if (!c) {
            ++missing;
            continue;
        }
        const double margin = bounds::direct_log_ratio(bp, PositivePair(c->a, c->b));
        worst_margin = std::max(worst_margin, margin);
        unsound += !(margin < 0.0);
    }
    return {missing == 0 && unsound == 0, std::to_string(missing) + " missing, " + std::to_string(unsound) +
                                              " not confirmed directly, largest direct margin " + fmt(worst_margin)};
}

Outcome theorem(BoundKind kind)
{
    const auto a = if_direction(kind);
    const auto b = only_if_direction(kind);
    return {a.pass && b.pass, "holds: " + a.detail + "; fails below: " + b.detail};
}

// Scans the same two grids the searcher uses, independently of it.
bool has_negative(const std::function<double(double)>& f)
{
    for (int k = 4; k <= 24; ++k)
        if (f(std::pow(10.0, -k / 4.0)) < 0.0)
            return true;
    for (int i = 1; i <= 999; ++i)
        if (f(i / 1000.0) < 0.0)
            return true;
    return false;
}

Outcome lemmas()
{
    int bad_coeff = 0;
    for (double s : {1.0, 1.5, 2.0, 10.0})
        for (int i = 0; i <= 20; ++i) {
            const bounds::LemmaParams lp(i / 20.0, s);
            for (std::size_t n = 0; n <= 10000; ++n)
                bad_coeff += !(bounds::coeff_a(n, lp) > 0.0 && bounds::coeff_b(n, lp) > 0.0);
        }

    int bad_sign = 0;
    int cases = 0;
    const auto xs = acceptance_x_grid();
    for (double s : {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0})
        for (int i = 0; i <= 40; ++i) {
            const bounds::LemmaParams lp(i / 40.0, s);
            const double products[] = {2.0 * s * lp.u, 1.5 * s * lp.u};  // f side: 2su vs 1; g side: 3su/2 vs 1
            for (int side = 0; side < 2; ++side) {
                auto f = [&lp, side](double x) { return side == 0 ? bounds::f_lemma(lp, x) : bounds::g_lemma(lp, x); };
                const double p = products[side];
                if (p <= 1.0) {
                    ++cases;
                    for (double x : xs) {
                        const double v = f(x);
                        if (!(v > -1e-13) || (x >= 1e-2 && !(v > 0.0))) {
                            ++bad_sign;
                            break;
                        }
                    }
                } else if (p >= 1.01) {
                    ++cases;
                    bad_sign += !has_negative(f);
                }
            }
        }
    return {bad_coeff == 0 && bad_sign == 0, std::to_string(bad_coeff) + " nonpositive coefficients, " +
                                                 std::to_string(bad_sign) + " of " + std::to_string(cases) +
                                                 " sign cases wrong"};
}

Outcome reductions()
{
    double worst_reduced = 0.0;
    for (double s : s_set)
        for (double t : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5})
            for (int i = 1; i <= 99; ++i) {
                const double x = i / 100.0;
                const double u = bounds::u_of_t(t);
                const double ag = bounds::log_ratio_ag({t, s, BoundKind::ag}, x);
                const double l = bounds::log_ratio_l({t, s, BoundKind::l}, x);
                worst_reduced = std::max(worst_reduced, std::abs(ag - bounds::f_lemma({u, s}, x)) / std::abs(ag));
                worst_reduced = std::max(worst_reduced, std::abs(l - bounds::g_lemma({u, s}, x)) / std::abs(l));
            }
    double worst_series = 0.0;
    for (double s : s_set)
        for (double u : {0.0, 0.25, 0.5, 0.75, 1.0})
            for (double x : {0.1, 0.3, 0.5, 0.7}) {
                const bounds::LemmaParams lp(u, s);
                const double cf = bounds::capital_f(lp, x), cg = bounds::capital_g(lp, x);
                worst_series = std::max(worst_series, std::abs(bounds::series_f(lp, x) - cf) / std::abs(cf));
                worst_series = std::max(worst_series, std::abs(bounds::series_g(lp, x) - cg) / std::abs(cg));
            }
    return {worst_reduced <= 1e-13 && worst_series <= 1e-10,
            "reduction " + fmt(worst_reduced) + ", series " + fmt(worst_series)};
}

Outcome determinism()
{
    auto once = [](int& code) {
        std::ostringstream out, err;
        code = cli::run({"verify", "all", "--seed", "42", "--format", "json"}, out, err);
        return out.str();
    };
    int c1 = -1, c2 = -1;
    const auto a = once(c1);
    const auto b = once(c2);
    return {!a.empty() && a == b && c1 == 0 && c2 == 0,
            std::to_string(a.size()) + " bytes, exit codes " + std::to_string(c1) + "/" + std::to_string(c2)};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"closed-form thresholds", thresholds},
        {"Gaussian identity", gaussian_identity},
        {"Landen identity", landen},
        {"dK/dr vs finite differences", dkdr},
        {"K series vs AGM path", k_paths},
        {"mean chains on 1000 seeded pairs", mean_chains},
        {"Q > AG holds at threshold", [] { return if_direction(BoundKind::ag); }},
        {"Q > AG fails below threshold", [] { return only_if_direction(BoundKind::ag); }},
        {"Q > L at and below threshold", [] { return theorem(BoundKind::l); }},
        {"lemma coefficients and sign dichotomy", lemmas},
        {"reduction identities", reductions},
        {"verify all determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu: %s  %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str());
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed ? 1 : 0;
}
