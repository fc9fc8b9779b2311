#include "bt/analytics.hpp"

#include <cmath>
#include <stdexcept>

#include "bt/synth.hpp"
#include "doctest.h"

using namespace bt;

namespace {

BacktestResult result_with(double initial,
                           std::vector<std::pair<Date, double>> values) {
    BacktestResult r;
    r.initial = initial;
    r.daily_values = std::move(values);
    return r;
}

}  // namespace

TEST_CASE("annual returns compare year-end closes") {
    SUBCASE("one year up ten percent") {
        const auto r = result_with(100000.0, {{Date(2000, 1, 3), 101000.0},
                                              {Date(2000, 6, 1), 90000.0},
                                              {Date(2000, 12, 29), 110000.0}});
        const auto per_year = annual_returns(r);
        REQUIRE(per_year.size() == 1);
        CHECK(per_year.at(2000) == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("a flat series returns zero") {
        const auto r = result_with(5000.0, {{Date(2000, 1, 3), 5000.0},
                                            {Date(2000, 12, 29), 5000.0}});
        CHECK(annual_returns(r).at(2000) == 0.0);
    }
    SUBCASE("partial years still produce a row") {
        const auto r = result_with(100000.0, {{Date(2000, 7, 3), 105000.0},
                                              {Date(2000, 12, 29), 110000.0},
                                              {Date(2001, 3, 30), 99000.0}});
        const auto per_year = annual_returns(r);
        REQUIRE(per_year.size() == 2);
        CHECK(per_year.at(2000) == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(per_year.at(2001) == doctest::Approx(-10.0).epsilon(1e-12));
    }
    SUBCASE("a year of steady daily compounding") {
        std::vector<std::pair<Date, double>> values;
        double v = 100000.0;
        Date d(2000, 1, 3);
        for (int i = 0; i < 252; ++i) {
            while (d.is_weekend()) d = d.next_day();
            v *= 1.001;
            values.emplace_back(d, v);
            d = d.next_day();
        }
        const auto per_year = annual_returns(result_with(100000.0, values));
        // 1.001^252 - 1
        CHECK(per_year.at(2000) ==
              doctest::Approx(28.6434044376).epsilon(1e-9));
    }
    SUBCASE("an empty series is an error") {
        try {
            annual_returns(result_with(1000.0, {}));
            FAIL("expected SpanTooShort");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SpanTooShort);
        }
    }
}

TEST_CASE("sharpe ratio reproduces the reference table") {
    CHECK(sharpe_ratio(15.13, 19.01, 1.75) == doctest::Approx(70.38).epsilon(2e-4));
    CHECK(sharpe_ratio(16.48, 23.87, 1.75) == doctest::Approx(61.71).epsilon(2e-4));
    try {
        sharpe_ratio(10.0, 0.0, 1.75);
        FAIL("expected DegenerateSeries");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateSeries);
    }
}

TEST_CASE("summary statistics over +10/-10") {
    const std::map<int, double> per_year{{2001, 10.0}, {2002, -10.0}};
    const auto stats = summarize(per_year);
    CHECK(stats.arithmetic == doctest::Approx(0.0));
    // sqrt(0.99) - 1 in percent
    CHECK(stats.geometric == doctest::Approx(-0.5012562894).epsilon(1e-9));
    CHECK(stats.sd == doctest::Approx(std::sqrt(200.0)).epsilon(1e-12));
    CHECK(stats.sharpe ==
          doctest::Approx(-1.75 / std::sqrt(200.0) * 100.0).epsilon(1e-12));
    CHECK(stats.risk_free == 1.75);

    const auto zero_rf = summarize(per_year, 0.0);
    CHECK(zero_rf.sharpe == doctest::Approx(0.0));
    CHECK(zero_rf.risk_free == 0.0);
}

TEST_CASE("arithmetic mean dominates geometric mean") {
    Rng rng(5150);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<int, double> per_year;
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 8));
        for (int y = 0; y < n; ++y) {
            per_year[2000 + y] = rng.uniform(-60.0, 90.0);
        }
        AnnualStats stats;
        try {
            stats = summarize(per_year);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateSeries);
            continue;
        }
        CHECK(stats.arithmetic >= stats.geometric - 1e-9);
    }
}

TEST_CASE("summary error conditions") {
    SUBCASE("fewer than two years") {
        try {
            summarize({{2001, 5.0}});
            FAIL("expected DegenerateSeries");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateSeries);
        }
    }
    SUBCASE("constant annual returns have no dispersion") {
        try {
            summarize({{2001, 5.0}, {2002, 5.0}, {2003, 5.0}});
            FAIL("expected DegenerateSeries");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateSeries);
            CHECK(std::string(e.what()).find("constant") != std::string::npos);
        }
    }
    SUBCASE("a total loss breaks the geometric mean") {
        try {
            summarize({{2001, -100.0}, {2002, 5.0}});
            FAIL("expected InvalidInput");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidInput);
            CHECK(std::string(e.what()).find("2001") != std::string::npos);
        }
    }
}

TEST_CASE("annual returns compound back to the final value") {
    SynthSpec spec;
    spec.seed = 404;
    spec.n_securities = 15;
    spec.n_years = 3;
    const auto data = generate(spec);

    BacktestConfig config;
    config.start = data.universe.calendar().front();
    config.end = data.universe.calendar().back();
    config.fees = FeeModel::zero();

    for (const auto& strategy : {StrategySpec::equ(), StrategySpec::mkc()}) {
        const auto r = run_backtest(data.universe, data.cpi, strategy, config);
        const auto per_year = annual_returns(r);
        double compounded = r.initial;
        for (const auto& [year, pct] : per_year) compounded *= 1.0 + pct / 100.0;
        CHECK(compounded ==
              doctest::Approx(r.final_value()).epsilon(1e-9));
    }
}
