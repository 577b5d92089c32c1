#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "meanbounds/bounds.hpp"
#include "meanbounds/elliptic.hpp"
#include "meanbounds/error.hpp"
#include "meanbounds/means.hpp"
#include "meanbounds/report.hpp"
#include "meanbounds/verify.hpp"

namespace meanbounds::cli {

enum class OutputFormat { plain, json, csv };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int not_found = 1;  // search found nothing, or a verify suite failed
inline constexpr int usage = 2;
inline constexpr int domain = 3;
inline constexpr int io = 4;
} // namespace exit_code

/// Bad command line: unknown name, wrong arity, malformed number or range.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double parse_number(std::string_view text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw usage_error("not a number: '" + std::string(text) + "'");
    return v;
}

/// "v" or "start:stop:step". The stop value is included when it lies within
/// half a step of the last grid point; points are start + i*step.
inline std::vector<double> parse_range(std::string_view text)
{
    const auto first = text.find(':');
    if (first == std::string_view::npos)
        return {parse_number(text)};
    const auto second = text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos)
        throw usage_error("range must be start:stop:step, got '" + std::string(text) + "'");
    const double start = parse_number(text.substr(0, first));
    const double stop = parse_number(text.substr(first + 1, second - first - 1));
    const double step = parse_number(text.substr(second + 1));
    if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
        throw usage_error("range needs step > 0 and stop >= start, got '" + std::string(text) + "'");
    const double span = (stop - start) / step;
    if (span > 1e7)
        throw usage_error("range has too many points: '" + std::string(text) + "'");
    const auto count = static_cast<std::size_t>(std::floor(span + 0.5)) + 1;
    std::vector<double> values;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        values.push_back(start + static_cast<double>(i) * step);
    return values;
}

inline OutputFormat parse_format(std::string_view name)
{
    if (name == "plain")
        return OutputFormat::plain;
    if (name == "json")
        return OutputFormat::json;
    if (name == "csv")
        return OutputFormat::csv;
    throw usage_error("unknown format '" + std::string(name) + "' (expected plain, json or csv)");
}

namespace detail {

using report::format_double;

struct Options {
    std::string format = "plain";
    std::uint64_t seed = 42;
    std::string out_path;

    // eval
    std::string eval_name;
    std::vector<std::string> eval_args;
    std::optional<double> t;
    std::optional<double> s;
    std::optional<double> u;

    // threshold / search / table
    std::string kind;
    std::string s_spec;
    std::string suite;
    std::optional<std::size_t> samples;
    bool per_sample = false;
    std::string table_what;
    std::string which = "f";
    std::string x_spec = "0.01:0.99:0.01";
    std::string s_range;
};

inline bounds::BoundKind parse_bound_kind(std::string_view name)
{
    if (name == "ag" || name == "AG")
        return bounds::BoundKind::ag;
    if (name == "l" || name == "L")
        return bounds::BoundKind::l;
    throw usage_error("unknown kind '" + std::string(name) + "' (expected ag or l)");
}

// Sink for command output: stdout, or a file opened on demand.
class Destination {
public:
    Destination(const std::string& path, std::ostream& fallback) : fallback_(fallback)
    {
        if (path.empty())
            return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_)
            throw io_error("cannot open '" + path + "' for writing");
    }

    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

    void close(const std::string& path)
    {
        if (!file_.is_open())
            return;
        file_.close();
        if (!file_)
            throw io_error("failed writing '" + path + "'");
    }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

// ---- eval ---------------------------------------------------------------

struct EvalResult {
    std::vector<std::pair<std::string, double>> values;
};

struct EvalFunction {
    std::size_t arity;
    bool needs_ts;
    std::function<EvalResult(const std::vector<double>&, double t, double s)> fn;
};

inline EvalResult single(double v) { return {{{"value", v}}}; }

inline const std::map<std::string, EvalFunction, std::less<>>& eval_table()
{
    using means::PositivePair;
    auto pair_mean = [](double (*mean)(const PositivePair&)) {
        return EvalFunction{2, false, [mean](const std::vector<double>& x, double, double) {
                                return single(mean(PositivePair(x[0], x[1])));
                            }};
    };
    auto unary = [](double (*fn)(double)) {
        return EvalFunction{1, false, [fn](const std::vector<double>& x, double, double) { return single(fn(x[0])); }};
    };
    static const std::map<std::string, EvalFunction, std::less<>> table = [&] {
        std::map<std::string, EvalFunction, std::less<>> m;
        m["H"] = pair_mean(&means::harmonic);
        m["G"] = pair_mean(&means::geometric);
        m["L"] = pair_mean(&means::logarithmic);
        m["A"] = pair_mean(&means::arithmetic);
        m["harmonic"] = m["H"];
        m["geometric"] = m["G"];
        m["logarithmic"] = m["L"];
        m["arithmetic"] = m["A"];
        m["agm"] = {2, false, [](const std::vector<double>& x, double, double) {
                        const auto tr = means::agm(PositivePair(x[0], x[1]));
                        return EvalResult{{{"value", tr.value}, {"iterations", static_cast<double>(tr.iterations)}}};
                    }};
        m["AG"] = m["agm"];
        m["qmean"] = {2, true, [](const std::vector<double>& x, double t, double s) {
                          return single(means::q_mean(t, s, PositivePair(x[0], x[1])));
                      }};
        m["Q"] = m["qmean"];
        m["contrast"] = pair_mean(&means::normalized_contrast);
        m["K"] = {1, false, [](const std::vector<double>& x, double, double) { return single(elliptic::ellip_k(x[0])); }};
        m["K_series"] = {1, false, [](const std::vector<double>& x, double, double) {
                             return single(elliptic::ellip_k_series(x[0]));
                         }};
        m["E"] = {1, false, [](const std::vector<double>& x, double, double) { return single(elliptic::ellip_e(x[0])); }};
        m["dKdr"] = unary(&elliptic::dk_dr);
        m["arth"] = unary(&elliptic::arth);
        m["landen"] = {1, false, [](const std::vector<double>& x, double, double) {
                           const auto [lhs, rhs] = elliptic::landen_pair(x[0]);
                           return EvalResult{{{"lhs", lhs}, {"rhs", rhs}}};
                       }};
        m["hyp2f1"] = {4, false, [](const std::vector<double>& x, double, double) {
                           const auto r = elliptic::hyp2f1(x[0], x[1], x[2], x[3]);
                           return EvalResult{{{"value", r.value},
                                              {"terms", static_cast<double>(r.terms)},
                                              {"truncated", r.truncated ? 1.0 : 0.0}}};
                       }};
        return m;
    }();
    return table;
}

inline int cmd_eval(const Options& o, OutputFormat fmt, std::ostream& out)
{
    const auto& table = eval_table();
    const auto it = table.find(o.eval_name);
    if (it == table.end())
        throw usage_error("unknown function '" + o.eval_name + "'");
    const auto& f = it->second;
    if (o.eval_args.size() != f.arity)
        throw usage_error(o.eval_name + " takes " + std::to_string(f.arity) + " argument(s), got " +
                          std::to_string(o.eval_args.size()));
    std::vector<double> args;
    for (const auto& a : o.eval_args)
        args.push_back(parse_number(a));
    if (f.needs_ts && (!o.t || !o.s))
        throw usage_error(o.eval_name + " requires --t and --s");
    const double t = o.t.value_or(0.0);
    const double s = o.s.value_or(0.0);
    const auto result = f.fn(args, t, s);

    switch (fmt) {
    case OutputFormat::plain:
        if (result.values.size() == 1 || o.eval_name == "agm" || o.eval_name == "AG" || o.eval_name == "hyp2f1") {
            out << format_double(result.values.front().second) << '\n';
        } else {
            for (const auto& [label, v] : result.values)
                out << label << ' ' << format_double(v) << '\n';
        }
        break;
    case OutputFormat::json: {
        nlohmann::json j;
        j["name"] = o.eval_name;
        j["args"] = args;
        if (f.needs_ts) {
            j["t"] = t;
            j["s"] = s;
        }
        for (const auto& [label, v] : result.values)
            j[label] = v;
        out << j.dump() << '\n';
        break;
    }
    case OutputFormat::csv: {
        report::CsvWriter csv(out);
        std::vector<std::string> header = {"name"};
        std::vector<std::string> row = {o.eval_name};
        for (std::size_t i = 0; i < args.size(); ++i) {
            header.push_back("arg" + std::to_string(i + 1));
            row.push_back(format_double(args[i]));
        }
        if (f.needs_ts) {
            header.insert(header.end(), {"t", "s"});
            row.insert(row.end(), {format_double(t), format_double(s)});
        }
        for (const auto& [label, v] : result.values) {
            header.push_back(label);
            row.push_back(format_double(v));
        }
        csv.row(header);
        csv.row(row);
        break;
    }
    }
    return exit_code::ok;
}

// ---- threshold ----------------------------------------------------------

struct ThresholdRow {
    double s;
    double threshold;
    double u;
    double product;  // 2su (ag) or 3su (l); 1 resp. 2 at the threshold
};

inline std::vector<ThresholdRow> threshold_rows(bounds::BoundKind kind, const std::vector<double>& s_values)
{
    std::vector<ThresholdRow> rows;
    for (double s : s_values) {
        const double t = bounds::threshold(kind, s);
        const double u = bounds::u_of_t(t);
        rows.push_back({s, t, u, (kind == bounds::BoundKind::ag ? 2.0 : 3.0) * s * u});
    }
    return rows;
}

inline int cmd_threshold(const Options& o, OutputFormat fmt, std::ostream& out)
{
    const auto kind = parse_bound_kind(o.kind);
    const auto rows = threshold_rows(kind, parse_range(o.s_spec));
    const std::string product = kind == bounds::BoundKind::ag ? "2su" : "3su";
    switch (fmt) {
    case OutputFormat::plain:
        for (const auto& r : rows)
            out << "s=" << format_double(r.s) << " threshold=" << format_double(r.threshold)
                << " u=" << format_double(r.u) << ' ' << product << '=' << format_double(r.product) << '\n';
        break;
    case OutputFormat::json: {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"kind", bounds::to_string(kind)}, {"s", r.s}, {"threshold", r.threshold}, {"u", r.u},
                           {product, r.product}});
        out << arr.dump() << '\n';
        break;
    }
    case OutputFormat::csv: {
        report::CsvWriter csv(out);
        csv.row({"s", "threshold", "u", product});
        for (const auto& r : rows)
            csv.row({format_double(r.s), format_double(r.threshold), format_double(r.u), format_double(r.product)});
        break;
    }
    }
    return exit_code::ok;
}

// ---- verify -------------------------------------------------------------

inline void print_counterexample(std::ostream& out, std::string_view label, const verify::Counterexample& c)
{
    out << "  " << label << ':';
    const std::pair<const char*, double> fields[] = {{"t", c.t},     {"s", c.s},     {"x", c.x},
                                                     {"a", c.a},     {"b", c.b},     {"value", c.value},
                                                     {"lhs", c.lhs}, {"rhs", c.rhs}, {"margin", c.margin}};
    for (const auto& [name, v] : fields)
        if (!std::isnan(v))
            out << ' ' << name << '=' << format_double(v);
    out << '\n';
}

inline int cmd_verify(const Options& o, OutputFormat fmt, std::ostream& stdout_stream)
{
    std::vector<std::string> names;
    if (o.suite == "all")
        names.assign(verify::suite_names.begin(), verify::suite_names.end());
    else if (verify::is_suite(o.suite))
        names.push_back(o.suite);
    else
        throw usage_error("unknown suite '" + o.suite + "'");

    verify::SampleSpec spec;
    spec.seed = o.seed;
    if (o.samples) {
        if (*o.samples < 1)
            throw usage_error("--samples must be >= 1");
        spec.n = *o.samples;
    }

    Destination dest(o.out_path, stdout_stream);
    std::ostream& out = dest.stream();

    std::vector<verify::VerifyReport> reports;
    if (o.per_sample) {
        report::CsvWriter csv(out);
        csv.row(report::sample_header());
        const verify::SampleSink sink = [&csv](const verify::SampleRecord& rec) { csv.row(report::sample_row(rec)); };
        for (const auto& n : names)
            reports.push_back(verify::run_suite(n, spec, &sink));
    } else {
        for (const auto& n : names)
            reports.push_back(verify::run_suite(n, spec));
        switch (fmt) {
        case OutputFormat::plain:
            for (const auto& r : reports) {
                out << r.suite << ": " << (r.ok() ? "PASS" : "FAIL") << " samples=" << r.samples
                    << " passes=" << r.passes << " failures=" << r.failures
                    << " worst_margin=" << format_double(r.worst_margin) << " witnesses=" << r.witnesses
                    << " seed=" << r.seed << '\n';
                if (r.counterexample)
                    print_counterexample(out, "counterexample", *r.counterexample);
                if (r.witness)
                    print_counterexample(out, "witness", *r.witness);
            }
            break;
        case OutputFormat::json:
            if (o.suite == "all") {
                auto arr = nlohmann::json::array();
                for (const auto& r : reports)
                    arr.push_back(report::to_json(r));
                out << arr.dump(2) << '\n';
            } else {
                out << report::to_json(reports.front()).dump(2) << '\n';
            }
            break;
        case OutputFormat::csv: {
            report::CsvWriter csv(out);
            csv.row(report::summary_header());
            for (const auto& r : reports)
                csv.row(report::summary_row(r));
            break;
        }
        }
    }
    dest.close(o.out_path);

    const bool all_ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.ok(); });
    return all_ok ? exit_code::ok : exit_code::not_found;
}

// ---- search -------------------------------------------------------------

inline int cmd_search(const Options& o, OutputFormat fmt, std::ostream& out)
{
    const auto kind = parse_bound_kind(o.kind);
    if (!o.t || !o.s)
        throw usage_error("search requires --t and --s");
    const bounds::BoundParams bp(*o.t, *o.s, kind);
    const auto found = verify::search_counterexample(bp);

    const std::vector<std::string> columns = {"x", "a", "b", "lhs", "rhs", "margin"};
    auto values = [](const verify::Counterexample& c) { return std::vector<double>{c.x, c.a, c.b, c.lhs, c.rhs, c.margin}; };

    switch (fmt) {
    case OutputFormat::plain:
        if (!found) {
            out << "none\n";
        } else {
            const auto v = values(*found);
            for (std::size_t i = 0; i < columns.size(); ++i)
                out << (i ? " " : "") << columns[i] << '=' << format_double(v[i]);
            out << '\n';
        }
        break;
    case OutputFormat::json: {
        nlohmann::json j = {{"kind", bounds::to_string(kind)}, {"t", bp.t}, {"s", bp.s}, {"found", found.has_value()}};
        j["counterexample"] = found ? report::to_json(*found) : nlohmann::json(nullptr);
        out << j.dump() << '\n';
        break;
    }
    case OutputFormat::csv: {
        report::CsvWriter csv(out);
        csv.row(columns);
        if (found) {
            std::vector<std::string> row;
            for (double v : values(*found))
                row.push_back(format_double(v));
            csv.row(row);
        }
        break;
    }
    }
    return found ? exit_code::ok : exit_code::not_found;
}

// ---- table --------------------------------------------------------------

inline constexpr const char* table_help =
    "Columns (CSV, header row, 17 significant digits):\n"
    "  ratios      x,a,b,log_ratio,ratio   log(Q_{t,s}/M) at (a,b) = (1+x,1-x), M = AG or L\n"
    "  thresholds  s,threshold,u,2su|3su   for --kind ag or l\n"
    "              s,threshold_ag,threshold_l for --kind both\n"
    "  lemma       x,f,F  (--which f)  or  x,g,G  (--which g)\n";

inline int cmd_table(const Options& o, std::ostream& stdout_stream)
{
    std::vector<std::vector<std::string>> rows;
    if (o.table_what == "ratios") {
        if (!o.t || !o.s)
            throw usage_error("table ratios requires --t and --s");
        const bounds::BoundParams bp(*o.t, *o.s, parse_bound_kind(o.kind.empty() ? "ag" : o.kind));
        rows.push_back({"x", "a", "b", "log_ratio", "ratio"});
        for (double x : parse_range(o.x_spec)) {
            const double v = bounds::log_ratio(bp, x);
            rows.push_back({format_double(x), format_double(1.0 + x), format_double(1.0 - x), format_double(v),
                            format_double(std::exp(v))});
        }
    } else if (o.table_what == "thresholds") {
        const auto s_values = parse_range(o.s_range.empty() ? "1:10:1" : o.s_range);
        const std::string kind = o.kind.empty() ? "both" : o.kind;
        if (kind == "both") {
            rows.push_back({"s", "threshold_ag", "threshold_l"});
            for (double s : s_values)
                rows.push_back({format_double(s), format_double(bounds::threshold_ag(s)),
                                format_double(bounds::threshold_l(s))});
        } else {
            const auto k = parse_bound_kind(kind);
            rows.push_back({"s", "threshold", "u", k == bounds::BoundKind::ag ? "2su" : "3su"});
            for (const auto& r : threshold_rows(k, s_values))
                rows.push_back({format_double(r.s), format_double(r.threshold), format_double(r.u),
                                format_double(r.product)});
        }
    } else if (o.table_what == "lemma") {
        if (!o.u || !o.s)
            throw usage_error("table lemma requires --u and --s");
        if (o.which != "f" && o.which != "g")
            throw usage_error("--which must be f or g");
        const bounds::LemmaParams lp(*o.u, *o.s);
        const bool is_f = o.which == "f";
        rows.push_back({"x", is_f ? "f" : "g", is_f ? "F" : "G"});
        for (double x : parse_range(o.x_spec)) {
            const double v = is_f ? bounds::f_lemma(lp, x) : bounds::g_lemma(lp, x);
            const double numerator = is_f ? bounds::capital_f(lp, x) : bounds::capital_g(lp, x);
            rows.push_back({format_double(x), format_double(v), format_double(numerator)});
        }
    } else {
        throw usage_error("unknown table '" + o.table_what + "' (expected ratios, thresholds or lemma)");
    }

    Destination dest(o.out_path, stdout_stream);
    report::CsvWriter csv(dest.stream());
    for (const auto& r : rows)
        csv.row(r);
    dest.close(o.out_path);
    return exit_code::ok;
}

} // namespace detail

/// Runs the command line `args` (without the program name). Returns the
/// process exit code; never throws for bad input.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    detail::Options o;
    CLI::App app{"Sharp bounds of Q_{t,s} against the arithmetic-geometric and logarithmic means", "meanbounds"};
    app.require_subcommand(1);
    app.add_option("--format", o.format, "Output format: plain, json or csv")
        ->check(CLI::IsMember({"plain", "json", "csv"}));
    app.add_option("--seed", o.seed, "Random seed for verification samples");
    app.add_option("--out", o.out_path, "Write output to PATH instead of stdout");

    auto* eval = app.add_subcommand("eval", "Evaluate a mean or special function");
    eval->add_option("name", o.eval_name,
                     "H G L A agm qmean contrast K K_series E dKdr arth landen hyp2f1")
        ->required();
    eval->add_option("args", o.eval_args, "Numeric arguments");
    eval->add_option("--t", o.t, "Weight t of qmean");
    eval->add_option("--s", o.s, "Exponent s of qmean");

    auto* threshold = app.add_subcommand("threshold", "Print the sharp threshold t for each s");
    threshold->add_option("kind", o.kind, "ag or l")->required();
    threshold->add_option("s", o.s_spec, "s value or start:stop:step range")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
    verify_cmd->add_option("suite", o.suite, "Suite name or 'all'")->required();
    verify_cmd->add_option("--samples", o.samples, "Number of random pairs");
    verify_cmd->add_flag("--per-sample", o.per_sample, "Emit one CSV row per sample instead of a summary");

    auto* search = app.add_subcommand("search", "Search for a counterexample to Q_{t,s} > AG or L");
    search->add_option("kind", o.kind, "ag or l")->required();
    search->add_option("--t", o.t, "Weight t")->required();
    search->add_option("--s", o.s, "Exponent s")->required();

    auto* table = app.add_subcommand("table", "Write a CSV table over a grid");
    table->footer(detail::table_help);
    table->add_option("what", o.table_what, "ratios, thresholds or lemma")->required();
    table->add_option("--kind", o.kind, "ag, l or both (thresholds only)");
    table->add_option("--t", o.t, "Weight t (ratios)");
    table->add_option("--s", o.s_range, "Exponent s; a range for thresholds");
    table->add_option("--u", o.u, "Lemma weight u (lemma)");
    table->add_option("--which", o.which, "f or g (lemma)");
    table->add_option("--x", o.x_spec, "x range start:stop:step");

    for (auto* sub : {eval, threshold, verify_cmd, search, table})
        sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_code::usage;
    }

    try {
        const auto fmt = parse_format(o.format);
        if (*eval)
            return detail::cmd_eval(o, fmt, out);
        if (*threshold)
            return detail::cmd_threshold(o, fmt, out);
        if (*verify_cmd)
            return detail::cmd_verify(o, fmt, out);
        if (*search)
            return detail::cmd_search(o, fmt, out);
        if (table->parsed()) {
            if (!o.s_range.empty() && o.table_what != "thresholds")
                o.s = parse_number(o.s_range);
            return detail::cmd_table(o, out);
        }
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const verify::usage_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const domain_error& e) {
        err << "error: precondition violated: " << e.what() << '\n';
        return exit_code::domain;
    } catch (const convergence_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::domain;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::io;
    }
    return exit_code::usage;
}

} // namespace meanbounds::cli
