#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <map>
#include <random>

#include "growthscreen/screen.hpp"
#include "oracles.hpp"

using namespace growthscreen;

namespace {

CompanySnapshot passing_snapshot(std::string symbol, double u1_value) {
    CompanySnapshot s;
    s.symbol = std::move(symbol);
    s.u1 = u1_value;
    s.p2s = 5.0;
    s.analyst_count = 3;
    s.tr = 1e9;
    s.gp = 4e8;
    s.sharpe = 1.0;
    s.market_cap = 300e9;
    s.bucket = CapBucket::Mega;
    return s;
}

std::vector<PriceBar> rising_bars(Date last, int n) {
    std::vector<PriceBar> bars;
    for (int i = 0; i < n; ++i) {
        double c = 100.0 + i;
        bars.push_back({last.minus_days(n - 1 - i), c, c + 0.5, c - 0.5, c});
    }
    return bars;
}

template <typename Parse>
auto load(const std::string& name, Parse parse) {
    std::ifstream in(std::string(GROWTHSCREEN_TEST_DATA) + "/universe/" + name);
    return parse(in);
}

}  // namespace

TEST(CapBucket, Examples) {
    EXPECT_EQ(cap_bucket(500e9), CapBucket::Mega);
    EXPECT_EQ(cap_bucket(200e9), CapBucket::Mega);
    EXPECT_EQ(cap_bucket(10e9), CapBucket::Big);
    EXPECT_EQ(cap_bucket(9.99e9), CapBucket::Mid);
    EXPECT_EQ(cap_bucket(2e9), CapBucket::Mid);
    EXPECT_EQ(cap_bucket(300e6), CapBucket::Small);
    EXPECT_EQ(cap_bucket(50e6), CapBucket::Micro);
    EXPECT_EQ(cap_bucket(40e6), CapBucket::Nano);
    EXPECT_EQ(cap_bucket(0.0), CapBucket::Nano);
}

TEST(CapBucket, TotalAndExclusive) {
    const BucketThresholds t;
    const std::vector<std::pair<double, CapBucket>> lower{
        {t.mega, CapBucket::Mega}, {t.big, CapBucket::Big},     {t.mid, CapBucket::Mid},
        {t.small, CapBucket::Small}, {t.micro, CapBucket::Micro}, {0.0, CapBucket::Nano}};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> exponent(0, 13);
    for (int i = 0; i < 10000; ++i) {
        const double cap = std::pow(10.0, exponent(rng));
        int matches = 0;
        CapBucket want = CapBucket::Nano;
        for (std::size_t k = 0; k < lower.size(); ++k) {
            const double hi = k == 0 ? INFINITY : lower[k - 1].first;
            if (cap >= lower[k].first && cap < hi) {
                ++matches;
                want = lower[k].second;
            }
        }
        ASSERT_EQ(matches, 1);
        EXPECT_EQ(cap_bucket(cap), want) << cap;
    }
}

TEST(CapBucket, CustomThresholdsValidate) {
    BucketThresholds t{100, 50, 20, 10, 5};
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(cap_bucket(60, t), CapBucket::Big);
    EXPECT_THROW((BucketThresholds{100, 100, 20, 10, 5}.validate()), std::invalid_argument);
    EXPECT_THROW((BucketThresholds{100, 50, 20, 10, 0}.validate()), std::invalid_argument);
}

TEST(Constraints, ReferenceRows) {
    CompanySnapshot nvda = passing_snapshot("NVDA", 24.48);
    nvda.p2s = 26.09;
    nvda.tr = 13065e6;
    nvda.gp = 6768e6;
    nvda.sharpe = 2.57;
    auto r = evaluate_constraints(nvda, 27.73);
    EXPECT_TRUE(r.c1_p2s && r.c2_analysts && r.c3_revenue && r.c4_profit && r.c5_sharpe);
    EXPECT_TRUE(r.pass);

    CompanySnapshot clxt = passing_snapshot("CLXT", 48.36);
    clxt.tr = 11e6;
    clxt.gp = -2e6;
    EXPECT_TRUE(evaluate_constraints(clxt, 27.73).c4_profit);

    CompanySnapshot lossy = passing_snapshot("LOSS", 10);
    lossy.gp = -0.3 * lossy.tr;
    auto lr = evaluate_constraints(lossy, 27.73);
    EXPECT_FALSE(lr.c4_profit);
    EXPECT_FALSE(lr.pass);
}

TEST(Constraints, IndividualFailures) {
    auto base = passing_snapshot("X", 1);
    auto s = base;
    s.p2s = 27.73;
    EXPECT_FALSE(evaluate_constraints(s, 27.73).c1_p2s);
    s.p2s.reset();
    EXPECT_FALSE(evaluate_constraints(s, 27.73).c1_p2s);
    s = base;
    s.analyst_count = 0;
    EXPECT_FALSE(evaluate_constraints(s, 27.73).c2_analysts);
    s = base;
    s.tr = 0;
    EXPECT_FALSE(evaluate_constraints(s, 27.73).c3_revenue);
    s = base;
    s.sharpe = 0;
    EXPECT_FALSE(evaluate_constraints(s, 27.73).c5_sharpe);
    s = base;
    s.gp = 0;
    EXPECT_TRUE(evaluate_constraints(s, 27.73).c4_profit);
}

TEST(Constraints, GrossLossBoundary) {
    EXPECT_TRUE(gross_profit_ok(100, -25));
    EXPECT_FALSE(gross_profit_ok(100, -25, true));
    EXPECT_TRUE(gross_profit_ok(100, -24.999, true));
    EXPECT_FALSE(gross_profit_ok(100, -25.001));
}

TEST(Constraints, GrossLossGrid) {
    for (int i = 1; i <= 201; ++i) {
        for (int j = 0; j < 201; ++j) {
            const double tr = i;
            const double gp = -100.0 + j;
            // 4 * gp is exact for these integers, so the oracle is exact too.
            const bool want = 4 * gp >= -tr;
            ASSERT_EQ(gross_profit_ok(tr, gp), want) << tr << "," << gp;
            ASSERT_EQ(gross_profit_ok(tr, gp, true), 4 * gp > -tr || gp >= 0) << tr << "," << gp;
        }
    }
}

TEST(Constraints, ConjunctionAndMonotonicity) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> p(0, 50), sh(-2, 3), tr(-1e8, 1e9), gp(-5e8, 5e8);
    std::uniform_int_distribution<int> an(0, 3);
    for (int i = 0; i < 10000; ++i) {
        CompanySnapshot s;
        s.p2s = p(rng);
        s.sharpe = sh(rng);
        s.tr = tr(rng);
        s.gp = gp(rng);
        s.analyst_count = an(rng);
        auto r = evaluate_constraints(s, 27.73);
        const bool c4 = s.gp >= 0 || s.tr >= -4 * s.gp;
        const bool want = *s.p2s < 27.73 && s.analyst_count >= 1 && s.tr > 0 && c4 && s.sharpe > 0;
        ASSERT_EQ(r.pass, want);
        if (r.pass) {
            auto cheaper = s;
            cheaper.p2s = *s.p2s * 0.5;
            auto better = s;
            better.sharpe = s.sharpe + 1.0;
            EXPECT_TRUE(evaluate_constraints(cheaper, 27.73).pass);
            EXPECT_TRUE(evaluate_constraints(better, 27.73).pass);
        }
    }
}

TEST(BuildSnapshot, HandComputedLines) {
    const Date as_of{2020, 11, 30};
    FundamentalSeries f{"SYN", {}};
    for (int i = 0; i < 5; ++i)
        f.points.push_back({as_of.minus_days(200 - 50 * i), 100e6 + 12.5e6 * i, 50e6 + 5e6 * i});
    CompanyMeta meta{"SYN", 20e9, 4, as_of};
    auto out = build_snapshot(f, rising_bars(as_of, 120), meta, as_of, {});
    ASSERT_TRUE(std::holds_alternative<CompanySnapshot>(out));
    const auto& s = std::get<CompanySnapshot>(out);
    // slope = rise / 200 days, evaluated at the last point: rise * 366 / (200 * last)
    EXPECT_NEAR(s.growth_tr, 100.0 * 50 * 366 / (200.0 * 150), 1e-9);
    EXPECT_NEAR(s.growth_gp, 100.0 * 20 * 366 / (200.0 * 70), 1e-9);
    EXPECT_NEAR(s.u1, (s.growth_tr + s.growth_gp) / 2, 1e-12);
    EXPECT_EQ(s.tr, 150e6);
    EXPECT_EQ(s.gp, 70e6);
    EXPECT_NEAR(*s.p2s, 20e9 / 150e6, 1e-12);
    EXPECT_NEAR(*s.ratio, 150.0 / 70.0, 1e-12);
    EXPECT_NEAR(*s.p2s_forecast, *s.p2s / (1 + s.u1 / 100), 1e-12);
    EXPECT_EQ(s.bucket, CapBucket::Big);
    EXPECT_EQ(s.flags, 0u);
    EXPECT_EQ(s.fit_points, 5u);
    EXPECT_GT(s.sharpe, 0.0);
}

TEST(BuildSnapshot, Exclusions) {
    const Date as_of{2020, 11, 30};
    CompanyMeta meta{"ONE", 1e9, 1, as_of};
    FundamentalSeries one{"ONE", {{as_of.minus_days(10), 5e6, 1e6}}};
    auto out = build_snapshot(one, rising_bars(as_of, 60), meta, as_of, {});
    ASSERT_TRUE(std::holds_alternative<Exclusion>(out));
    EXPECT_EQ(std::get<Exclusion>(out), (Exclusion{"ONE", "insufficient-data"}));

    FundamentalSeries two{"TWO", {{as_of.minus_days(100), 5e6, 1e6}, {as_of, 6e6, 1.2e6}}};
    out = build_snapshot(two, {}, meta, as_of, {});
    EXPECT_EQ(std::get<Exclusion>(out).reason, "no-price-history");
    out = build_snapshot(two, rising_bars(as_of, 10), meta, as_of, {});
    EXPECT_EQ(std::get<Exclusion>(out).reason, "insufficient-price-history");

    // Both fits pass through zero at the last date.
    FundamentalSeries zero{"ZERO", {{as_of.minus_days(100), 5e6, 1e6}, {as_of, 0, 0}}};
    out = build_snapshot(zero, rising_bars(as_of, 60), meta, as_of, {});
    EXPECT_EQ(std::get<Exclusion>(out).reason, "zero-baseline");
}

TEST(BuildSnapshot, DegenerateFitIsFlaggedNotDropped) {
    const Date as_of{2020, 11, 30};
    FundamentalSeries f{"DEG", {}};
    for (int i = 0; i < 4; ++i)
        f.points.push_back({as_of.minus_days(150 - 50 * i), 100e6 + 10e6 * i, 10e6 - 8e6 * i});
    CompanyMeta meta{"DEG", 1e9, 1, as_of};
    auto s = std::get<CompanySnapshot>(build_snapshot(f, rising_bars(as_of, 60), meta, as_of, {}));
    EXPECT_TRUE(s.flags & kFlagDegenerateFit);
    EXPECT_EQ(flags_to_string(s.flags), "degenerate-fit");
}

TEST(Rank, ReferenceTopThree) {
    std::vector<CompanySnapshot> snaps{passing_snapshot("PG", 18.89), passing_snapshot("NVDA", 24.48),
                                       passing_snapshot("HD", 20.24)};
    std::vector<ConstraintReport> reports;
    for (const auto& s : snaps) reports.push_back(evaluate_constraints(s, 27.73));
    auto top = rank(snaps, reports, CapBucket::Mega, 10);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].symbol, "NVDA");
    EXPECT_EQ(top[1].symbol, "HD");
    EXPECT_EQ(top[2].symbol, "PG");
    EXPECT_EQ(rank(snaps, reports, CapBucket::Mega, 2).size(), 2u);
    EXPECT_TRUE(rank(snaps, reports, CapBucket::Big).empty());

    for (auto& r : reports) r.pass = false;
    EXPECT_TRUE(rank(snaps, reports, CapBucket::Mega).empty());
    EXPECT_THROW(rank(snaps, reports, CapBucket::Mega, 0), std::invalid_argument);
}

TEST(Rank, MatchesSortFilterTruncateOracle) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> u(-50, 50), b(0, 5), coin(0, 1), n(1, 15);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<CompanySnapshot> snaps;
        std::vector<ConstraintReport> reports;
        for (int i = 0; i < 40; ++i) {
            auto s = passing_snapshot("S" + std::to_string(1000 + u(rng) * 7 + i), u(rng) * 0.5);
            s.bucket = kAllBuckets[static_cast<std::size_t>(b(rng))];
            snaps.push_back(s);
            ConstraintReport r;
            r.pass = coin(rng);
            reports.push_back(r);
        }
        const CapBucket bucket = kAllBuckets[static_cast<std::size_t>(b(rng))];
        const auto limit = static_cast<std::size_t>(n(rng));
        std::vector<std::pair<double, std::string>> want;
        for (std::size_t i = 0; i < snaps.size(); ++i)
            if (reports[i].pass && snaps[i].bucket == bucket)
                want.push_back({-snaps[i].u1, snaps[i].symbol});
        std::sort(want.begin(), want.end());
        if (want.size() > limit) want.resize(limit);
        auto got = rank(snaps, reports, bucket, limit);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].symbol, want[i].second);
            EXPECT_EQ(got[i].u1, -want[i].first);
        }
    }
}

TEST(ScreenUniverse, FixtureUniverse) {
    auto f = load("fundamentals.csv", [](std::istream& in) { return parse_fundamentals(in); });
    auto p = load("prices.csv", [](std::istream& in) { return parse_prices(in); });
    auto m = load("meta.csv", [](std::istream& in) { return parse_meta(in); });
    const Date as_of{2020, 11, 30};
    auto run = screen_universe(f, p, m, as_of, {});

    std::map<std::string, std::string> excluded;
    for (const auto& e : run.exclusions) excluded[e.symbol] = e.reason;
    EXPECT_EQ(excluded["XNOP"], "no-price-history");
    EXPECT_EQ(excluded["XNOM"], "no-meta");
    EXPECT_EQ(excluded["NAN3"], "insufficient-data");
    EXPECT_EQ(run.snapshots.size() + run.exclusions.size(), 20u);

    std::map<std::string, std::pair<CompanySnapshot, ConstraintReport>> by;
    for (std::size_t i = 0; i < run.snapshots.size(); ++i)
        by[run.snapshots[i].symbol] = {run.snapshots[i], run.reports[i]};
    ASSERT_EQ(by.count("BIG2"), 1u);
    EXPECT_FALSE(by["BIG2"].second.c2_analysts);
    EXPECT_FALSE(by["BIG3"].second.c4_profit);
    EXPECT_TRUE(by["SML1"].second.c4_profit);
    EXPECT_FALSE(by["MID2"].second.c5_sharpe);
    EXPECT_FALSE(by["MEGA3"].second.c1_p2s);
    EXPECT_FALSE(by["MIC3"].second.c3_revenue);
    EXPECT_TRUE(by["MIC3"].first.flags & kFlagUndefinedP2s);
    EXPECT_TRUE(by["SML2"].first.flags & kFlagDegenerateFit);
    EXPECT_FALSE(by["NAN2"].first.ratio.has_value());
    EXPECT_EQ(by["MEGA1"].first.bucket, CapBucket::Mega);
    EXPECT_EQ(by["NAN1"].first.bucket, CapBucket::Nano);

    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        const auto& r = run.reports[i];
        EXPECT_EQ(r.pass, r.c1_p2s && r.c2_analysts && r.c3_revenue && r.c4_profit && r.c5_sharpe);
        EXPECT_EQ(run.snapshots[i].bucket, cap_bucket(run.snapshots[i].market_cap));
    }

    auto again = screen_universe(f, p, m, as_of, {});
    ASSERT_EQ(again.snapshots.size(), run.snapshots.size());
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        EXPECT_EQ(std::memcmp(&again.snapshots[i].u1, &run.snapshots[i].u1, sizeof(double)), 0);
        EXPECT_EQ(std::memcmp(&again.snapshots[i].sharpe, &run.snapshots[i].sharpe, sizeof(double)), 0);
    }
    EXPECT_EQ(again.cutoff, run.cutoff);

    auto pinned = screen_universe(f, p, m, as_of, {}, CutoffMode::Pinned);
    EXPECT_EQ(pinned.cutoff, 27.73);
}
