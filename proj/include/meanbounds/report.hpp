#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "meanbounds/verify.hpp"

namespace meanbounds::report {

inline constexpr int machine_digits = 17;

/// Shortest-form %.17g rendering; NaN renders as an empty string so that CSV
/// cells for fields a suite does not use stay blank.
inline std::string format_double(double v, int digits = machine_digits)
{
    if (std::isnan(v))
        return {};
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return {buf, res.ptr};
}

// JSON has no NaN; unused fields serialize as null.
inline nlohmann::json number_or_null(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

inline nlohmann::json to_json(const verify::Counterexample& c)
{
    return {
        {"t", number_or_null(c.t)},         {"s", number_or_null(c.s)},         {"x", number_or_null(c.x)},
        {"a", number_or_null(c.a)},         {"b", number_or_null(c.b)},         {"value", number_or_null(c.value)},
        {"lhs", number_or_null(c.lhs)},     {"rhs", number_or_null(c.rhs)},     {"margin", number_or_null(c.margin)},
    };
}

inline nlohmann::json to_json(const verify::VerifyReport& r)
{
    nlohmann::json j;
    j["suite"] = r.suite;
    j["samples"] = r.samples;
    j["passes"] = r.passes;
    j["failures"] = r.failures;
    j["worst_margin"] = number_or_null(r.worst_margin);
    j["counterexample"] = r.counterexample ? to_json(*r.counterexample) : nlohmann::json(nullptr);
    j["seed"] = r.seed;
    j["witnesses"] = r.witnesses;
    j["witness"] = r.witness ? to_json(*r.witness) : nlohmann::json(nullptr);
    j["status"] = r.ok() ? "pass" : "fail";
    return j;
}

/// RFC 4180 style writer: comma separated, LF line endings, fields quoted
/// only when they contain a delimiter, quote or newline.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i)
                out_ << ',';
            write_field(fields[i]);
        }
        out_ << '\n';
    }

private:
    void write_field(std::string_view f)
    {
        if (f.find_first_of(",\"\n\r") == std::string_view::npos) {
            out_ << f;
            return;
        }
        out_ << '"';
        for (char ch : f) {
            if (ch == '"')
                out_ << '"';
            out_ << ch;
        }
        out_ << '"';
    }

    std::ostream& out_;
};

inline const std::vector<std::string>& summary_header()
{
    static const std::vector<std::string> header = {"suite", "samples", "passes", "failures", "worst_margin",
                                                    "witnesses", "seed", "status"};
    return header;
}

inline std::vector<std::string> summary_row(const verify::VerifyReport& r)
{
    return {r.suite,
            std::to_string(r.samples),
            std::to_string(r.passes),
            std::to_string(r.failures),
            format_double(r.worst_margin),
            std::to_string(r.witnesses),
            std::to_string(r.seed),
            r.ok() ? "pass" : "fail"};
}

inline const std::vector<std::string>& sample_header()
{
    static const std::vector<std::string> header = {"suite", "index", "a", "b", "t", "s", "x", "value", "pass"};
    return header;
}

inline std::vector<std::string> sample_row(const verify::SampleRecord& rec)
{
    return {std::string(rec.suite),  std::to_string(rec.index), format_double(rec.a),
            format_double(rec.b),    format_double(rec.t),      format_double(rec.s),
            format_double(rec.x),    format_double(rec.value),  rec.pass ? "1" : "0"};
}

} // namespace meanbounds::report
