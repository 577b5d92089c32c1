#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "meanbounds/bounds.hpp"
#include "meanbounds/cli.hpp"

namespace cli = meanbounds::cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST(ParseRange, Inclusive)
{
    EXPECT_EQ(cli::parse_range("1:5:1"), (std::vector<double>{1, 2, 3, 4, 5}));
    EXPECT_EQ(cli::parse_range("0.01:0.99:0.01").size(), 99u);
    EXPECT_EQ(cli::parse_range("1:10:0.5").size(), 19u);
    EXPECT_EQ(cli::parse_range("2.5"), (std::vector<double>{2.5}));
    EXPECT_THROW(cli::parse_range("1:2"), cli::usage_error);
    EXPECT_THROW(cli::parse_range("1:2:0"), cli::usage_error);
    EXPECT_THROW(cli::parse_range("2:1:1"), cli::usage_error);
    EXPECT_THROW(cli::parse_range("a:b:c"), cli::usage_error);
}

TEST(Eval, Examples)
{
    auto r = run({"eval", "K", "0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1.5707963267948966\n");
    r = run({"eval", "A", "1", "3"});
    EXPECT_EQ(r.out, "2\n");
    r = run({"eval", "agm", "1", "0.5"});
    ASSERT_EQ(r.code, 0);
    const double v = std::stod(r.out);
    EXPECT_NEAR(meanbounds::elliptic::pi / (2 * v), meanbounds::elliptic::ellip_k(std::sqrt(0.75)), 1e-12);
    r = run({"eval", "qmean", "--t", "0.2", "--s", "1.5", "2", "8"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NEAR(std::stod(r.out), meanbounds::means::q_mean(0.2, 1.5, {2, 8}), 1e-15);
    r = run({"eval", "hyp2f1", "1", "1", "2", "-0.5"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), 2 * std::log(1.5), 1e-15);
}

TEST(Eval, FormatsAgree)
{
    const auto plain = run({"eval", "E", "0.5"});
    const auto json = run({"--format", "json", "eval", "E", "0.5"});
    const auto csv = run({"eval", "E", "0.5", "--format", "csv"});
    ASSERT_EQ(plain.code, 0);
    ASSERT_EQ(json.code, 0);
    ASSERT_EQ(csv.code, 0);
    const double p = std::stod(plain.out);
    const auto j = nlohmann::json::parse(json.out);
    EXPECT_EQ(j["value"].get<double>(), p);
    EXPECT_EQ(j["args"][0].get<double>(), 0.5);
    const auto rows = parse_csv(csv.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].back(), "value");
    EXPECT_EQ(std::stod(rows[1].back()), p);
}

TEST(Eval, Errors)
{
    EXPECT_EQ(run({"eval", "nosuch", "1"}).code, 2);
    EXPECT_EQ(run({"eval", "A", "1"}).code, 2);
    EXPECT_EQ(run({"eval", "qmean", "1", "2"}).code, 2);
    EXPECT_EQ(run({"eval", "A", "x", "2"}).code, 2);
    const auto r = run({"eval", "K", "1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("x < 1"), std::string::npos) << r.err;
    EXPECT_EQ(run({"eval", "H", "-1", "2"}).code, 3);
    EXPECT_EQ(run({"eval", "qmean", "--t", "0.7", "--s", "1", "1", "2"}).code, 3);
}

TEST(Threshold, Examples)
{
    auto r = run({"--format", "csv", "threshold", "ag", "1"});
    ASSERT_EQ(r.code, 0);
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][1], "0.14644660940672624");

    r = run({"--format", "csv", "threshold", "l", "2"});
    rows = parse_csv(r.out);
    EXPECT_NEAR(std::stod(rows[1][1]), 0.5 - std::sqrt(3.0) / 6.0, 1e-15);

    r = run({"threshold", "ag", "1:5:1", "--format", "csv"});
    rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t i = 2; i < rows.size(); ++i)
        EXPECT_GT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));

    r = run({"threshold", "ag", "1"});
    EXPECT_NE(r.out.find("threshold=0.14644660940672624"), std::string::npos) << r.out;
}

TEST(Threshold, Errors)
{
    EXPECT_EQ(run({"threshold", "ag", "0.5"}).code, 3);
    EXPECT_EQ(run({"threshold", "xx", "1"}).code, 2);
    EXPECT_EQ(run({"threshold", "ag"}).code, 2);
}

TEST(Verify, ExitCodes)
{
    EXPECT_EQ(run({"verify", "gaussian_identity"}).code, 0);
    EXPECT_EQ(run({"verify", "theorem12", "--samples", "2000"}).code, 0);
    EXPECT_EQ(run({"verify", "bogus"}).code, 2);
    EXPECT_EQ(run({"verify", "landen", "--samples", "0"}).code, 2);
}

TEST(Verify, JsonAllIsDeterministic)
{
    const auto a = run({"verify", "all", "--seed", "7", "--format", "json"});
    const auto b = run({"verify", "all", "--seed", "7", "--format", "json"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::json::parse(a.out);
    ASSERT_TRUE(j.is_array());
    EXPECT_EQ(j.size(), 12u);
    for (const auto& r : j) {
        EXPECT_EQ(r["seed"], 7);
        EXPECT_EQ(r["failures"], 0);
    }
}

TEST(Verify, CsvSummaryAndPerSample)
{
    auto r = run({"--format", "csv", "verify", "mean_chain", "--seed", "3"});
    ASSERT_EQ(r.code, 0);
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0][0], "suite");
    EXPECT_EQ(rows[1][0], "mean_chain");

    r = run({"verify", "mean_chain", "--per-sample", "--samples", "25"});
    ASSERT_EQ(r.code, 0);
    rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 26u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double a = std::stod(rows[i][2]), b = std::stod(rows[i][3]);
        EXPECT_GT(a, 0.0);
        EXPECT_GT(b, 0.0);
        EXPECT_EQ(rows[i][8], "1");
    }
}

TEST(Search, Examples)
{
    auto r = run({"search", "ag", "--t", "0.13", "--s", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("margin=-"), std::string::npos) << r.out;
    r = run({"search", "ag", "--t", "0.25", "--s", "2"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.out, "none\n");
    r = run({"--format", "json", "search", "l", "--t", "0.08", "--s", "1"});
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["found"].get<bool>());
    EXPECT_LT(j["counterexample"]["margin"].get<double>(), 0.0);
}

TEST(Search, Errors)
{
    EXPECT_EQ(run({"search", "ag", "--t", "0.7", "--s", "1"}).code, 3);
    EXPECT_EQ(run({"search", "ag", "--t", "0.2"}).code, 2);
}

TEST(Table, RatiosRoundTrip)
{
    const auto r = run({"table", "ratios", "--kind", "ag", "--t", "0.2", "--s", "1", "--x", "0.01:0.99:0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 100u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "a", "b", "log_ratio", "ratio"}));
    const meanbounds::bounds::BoundParams bp(0.2, 1.0, meanbounds::bounds::BoundKind::ag);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = std::stod(rows[i][0]);
        const double v = std::stod(rows[i][3]);
        EXPECT_GT(v, 0.0);
        EXPECT_EQ(v, meanbounds::bounds::log_ratio(bp, x));
    }
}

TEST(Table, LemmaAndThresholds)
{
    auto r = run({"table", "lemma", "--which", "f", "--u", "0.6", "--s", "1", "--x", "0.001:0.2:0.001"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 201u);
    EXPECT_LT(std::stod(rows[1][1]), 0.0);

    r = run({"table", "thresholds", "--kind", "both", "--s", "1:10:0.5"});
    rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 20u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"s", "threshold_ag", "threshold_l"}));
}

TEST(Table, OutFileAndErrors)
{
    const auto path = std::filesystem::temp_directory_path() / "meanbounds_cli_test.csv";
    auto r = run({"--out", path.string(), "table", "thresholds", "--kind", "ag", "--s", "1:3:1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(parse_csv(buf.str()).size(), 4u);
    std::filesystem::remove(path);

    EXPECT_EQ(run({"--out", "/nonexistent/dir/x.csv", "table", "thresholds"}).code, 4);
    EXPECT_EQ(run({"table", "bogus"}).code, 2);
    EXPECT_EQ(run({"table", "lemma", "--which", "h", "--u", "0.5", "--s", "1", "--x", "0.1:0.2:0.1"}).code, 2);
    EXPECT_EQ(run({"table", "ratios", "--t", "0.2", "--s", "1", "--x", "0.5:1:0.5"}).code, 3);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"--format", "xml", "eval", "K", "0"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}
