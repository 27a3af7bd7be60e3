#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "growthscreen/cli.hpp"

using namespace growthscreen;

namespace {

const std::string kData = GROWTHSCREEN_TEST_DATA;
const std::string kFund = kData + "/universe/fundamentals.csv";
const std::string kPrices = kData + "/universe/prices.csv";
const std::string kMeta = kData + "/universe/meta.csv";

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "growthscreen");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content = {}) {
    auto p = std::filesystem::temp_directory_path() / ("growthscreen_test_" + name);
    std::ofstream(p) << content;
    return p;
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(CliGrowth, CrwdFixture) {
    for (auto as_of : {std::string("2020-10-31"), std::string()}) {
        std::vector<std::string> args{"growth", "--fundamentals", kData + "/crwd.csv"};
        if (!as_of.empty()) args.insert(args.end(), {"--as-of", as_of});
        auto r = invoke(args);
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(r.out, "symbol,tr_growth,gp_growth,u1,points,flags\nCRWD,47.42,55.70,51.56,5,\n");
    }
}

TEST(CliGrowth, JsonFormat) {
    auto r = invoke({"growth", "--fundamentals", kData + "/crwd.csv", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j[0]["u1"], 51.56);
}

TEST(CliScreen, CsvIsDeterministic) {
    std::vector<std::string> args{"screen", "--fundamentals", kFund, "--prices", kPrices,
                                  "--meta", kMeta, "--as-of", "2020-11-30"};
    auto a = invoke(args);
    auto b = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.err, b.err);
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')),
              "symbol,u1,p2s,sharpe,tr_mio,gp_mio,ratio,p2s_fcst,bucket,flags");
    EXPECT_NE(a.err.find("excluded XNOP: no-price-history"), std::string::npos);
    EXPECT_NE(a.err.find("excluded XNOM: no-meta"), std::string::npos);
    EXPECT_EQ(a.out.find("BIG2,"), std::string::npos);  // no analysts
    EXPECT_EQ(a.out.find("BIG3,"), std::string::npos);  // gross loss too large
}

TEST(CliScreen, FormatsAndSnapshots) {
    auto snaps = temp_file("snapshots.csv");
    auto md = invoke({"screen", "--fundamentals", kFund, "--prices", kPrices, "--meta", kMeta,
                      "--format", "markdown", "--p2s-cutoff", "pinned", "--snapshots-out",
                      snaps.string()});
    ASSERT_EQ(md.code, 0) << md.err;
    EXPECT_NE(md.out.find("## NanoCaps"), std::string::npos);
    EXPECT_NE(md.out.find("P2S cutoff 27.73 (pinned)"), std::string::npos);
    const std::string s = read_all(snaps);
    EXPECT_EQ(s.substr(0, 7), "symbol,");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 18);  // header + 17 snapshots

    auto js = invoke({"screen", "--fundamentals", kFund, "--prices", kPrices, "--meta", kMeta,
                      "--format", "json", "--top-n", "1"});
    ASSERT_EQ(js.code, 0) << js.err;
    auto j = nlohmann::json::parse(js.out);
    for (const auto& t : j["tables"]) EXPECT_LE(t["rows"].size(), 1u);
    std::filesystem::remove(snaps);
}

TEST(CliScreen, ConfigFileAndFlagPrecedence) {
    auto cfg = temp_file("cfg.txt", "top_n = 1\noutput_format = json\n");
    std::vector<std::string> base{"screen", "--fundamentals", kFund, "--prices", kPrices,
                                  "--meta", kMeta, "--config", cfg.string()};
    auto from_file = invoke(base);
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    auto j = nlohmann::json::parse(from_file.out);
    for (const auto& t : j["tables"]) EXPECT_LE(t["rows"].size(), 1u);

    auto args = base;
    args.insert(args.end(), {"--format", "csv"});
    auto flagged = invoke(args);
    ASSERT_EQ(flagged.code, 0);
    EXPECT_EQ(flagged.out.substr(0, 7), "symbol,");

    auto bad = temp_file("bad.txt", "nonsense = 3\n");
    auto r = invoke({"screen", "--fundamentals", kFund, "--prices", kPrices, "--meta", kMeta,
                     "--config", bad.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("nonsense"), std::string::npos);
    std::filesystem::remove(cfg);
    std::filesystem::remove(bad);
}

TEST(CliHist, StatsBlock) {
    auto r = invoke({"hist", "--fundamentals", kFund, "--meta", kMeta, "--cap-floor", "0",
                     "--revenue-floor", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, 23), "bin_low,bin_high,count\n");
    EXPECT_NE(r.out.find("\nmean,sigma,cutoff,count\n"), std::string::npos);
    EXPECT_NE(r.out.find("99,100,"), std::string::npos);
    EXPECT_NE(r.out.find("100,inf,"), std::string::npos);
}

TEST(CliBacktest, RowsAndPositions) {
    auto pos = temp_file("positions.csv");
    auto r = invoke({"backtest", "--prices", kPrices, "--positions-out", pos.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "symbol,sharpe,buy_hold_sharpe,trade_count,bars");
    EXPECT_NE(r.out.find("\nMID2,0.00,"), std::string::npos);
    EXPECT_EQ(read_all(pos).substr(0, 21), "symbol,date,position\n");
    std::filesystem::remove(pos);
}

TEST(CliTtm, ConvertsAndRejectsShortSeries) {
    auto q = temp_file("q.csv",
                       "symbol,date,total_revenue,gross_profit\n"
                       "A,2020-01-31,1,10\nA,2020-04-30,2,20\nA,2020-07-31,3,30\n"
                       "A,2020-10-31,4,40\nA,2021-01-31,5,50\n"
                       "B,2020-01-31,1,1\n");
    auto r = invoke({"ttm", "--input", q.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("symbol B"), std::string::npos);

    r = invoke({"ttm", "--input", q.string(), "--skip-short"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out,
              "symbol,date,total_revenue,gross_profit\n"
              "A,2020-10-31,10,100\n"
              "A,2021-01-31,14,140\n");
    EXPECT_NE(r.err.find("excluded B"), std::string::npos);
    std::filesystem::remove(q);
}

TEST(CliErrors, ExitCodes) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"growth"}).code, 2);
    EXPECT_EQ(invoke({"growth", "--fundamentals", kFund, "--bogus"}).code, 2);
    EXPECT_EQ(invoke({"growth", "--fundamentals", kFund, "--window-days", "0"}).code, 2);
    EXPECT_EQ(invoke({"growth", "--fundamentals", kFund, "--as-of", "2020-13-01"}).code, 2);
    EXPECT_EQ(invoke({"growth", "--fundamentals", kFund, "--format", "xml"}).code, 2);

    auto missing = invoke({"growth", "--fundamentals", "/nonexistent/f.csv"});
    EXPECT_EQ(missing.code, 1);
    EXPECT_NE(missing.err.find("/nonexistent/f.csv"), std::string::npos);

    auto bad = temp_file("badrow.csv",
                         "symbol,date,total_revenue,gross_profit\nA,2020-01-31,1,1\nA,2020-02-30,1,1\n");
    auto r = invoke({"growth", "--fundamentals", bad.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find(bad.string()), std::string::npos) << r.err;

    auto schema = temp_file("schema.csv", "sym,date,tr,gp\n");
    EXPECT_EQ(invoke({"growth", "--fundamentals", schema.string()}).code, 1);
    std::filesystem::remove(bad);
    std::filesystem::remove(schema);
}

TEST(CliHelp, DocumentsParametersAndDefaults) {
    auto r = invoke({"screen", "--help"});
    EXPECT_EQ(r.code, 0);
    for (const char* needle : {"--window-days", "250", "--atr-period", "14", "--atr-multiplier",
                               "--p2s-cutoff", "computed", "--top-n", "10", "--eval-at",
                               "last-data-date", "--bucket-thresholds", "200000000000",
                               "--format", "csv", "--strict-c4", "--cap-floor", "--revenue-floor"})
        EXPECT_NE(r.out.find(needle), std::string::npos) << needle;

    for (const char* sub : {"growth", "hist", "backtest", "ttm"}) {
        auto h = invoke({sub, "--help"});
        EXPECT_EQ(h.code, 0) << sub;
        EXPECT_FALSE(h.out.empty()) << sub;
    }
    EXPECT_NE(invoke({"hist", "--help"}).out.find("--bin-width"), std::string::npos);
    EXPECT_NE(invoke({"backtest", "--help"}).out.find("--atr-multiplier"), std::string::npos);
}

TEST(CliOutput, FileOutputMatchesStdout) {
    auto path = temp_file("growth_out.csv");
    auto to_file = invoke({"growth", "--fundamentals", kFund, "-o", path.string()});
    auto to_stdout = invoke({"growth", "--fundamentals", kFund});
    ASSERT_EQ(to_file.code, 0);
    EXPECT_TRUE(to_file.out.empty());
    EXPECT_EQ(read_all(path), to_stdout.out);
    std::filesystem::remove(path);
}
