#include "bt/market_data.hpp"

#include <string>
#include <vector>

#include "bt/synth.hpp"
#include "doctest.h"
#include "temp_dir.hpp"

using namespace bt;

namespace {

const char* kSmallCsv =
    "date,security_id,close,ret_total,ret_capital,shares_out\n"
    "2016-01-04,AAPL,100.0,0.01,0.009,1000\n"
    "2016-01-04,MSFT,50.0,-0.002,-0.002,2000\n"
    "2016-01-05,AAPL,101.0,0.01,0.01,1000\n";

/// Contiguous monthly CPI whose 2016-12 / 1958-01 ratio is exactly the
/// published 8.283776 conversion factor.
CpiSeries paper_ratio_cpi() {
    CpiSeries cpi;
    const YearMonth first{1958, 1}, last{2016, 12};
    for (YearMonth m = first; m <= last; m = m.next()) cpi.set(m, 50.0);
    cpi.set(first, 10.0);
    cpi.set(last, 82.83776);
    cpi.validate();
    return cpi;
}

}  // namespace

TEST_CASE("three-row file yields two securities and two trading dates") {
    TempDir tmp;
    const auto u = load_universe(tmp.write("securities.csv", kSmallCsv));
    CHECK(u.securities() == std::vector<SecurityId>{"AAPL", "MSFT"});
    CHECK(u.calendar() ==
          std::vector<Date>{Date(2016, 1, 4), Date(2016, 1, 5)});
    CHECK(u.total_bars() == 3);
    const auto* bar = u.bar("AAPL", Date(2016, 1, 4));
    REQUIRE(bar);
    CHECK(bar->close == 100.0);
    CHECK(bar->ret_total == 0.01);
    CHECK(bar->shares_out == 1000.0);
}

TEST_CASE("duplicate row is rejected naming both line numbers") {
    TempDir tmp;
    const auto file = tmp.write(
        "securities.csv",
        "date,security_id,close,ret_total,ret_capital,shares_out\n"
        "2016-01-04,AAPL,100.0,0.01,0.009,1000\n"
        "2016-01-05,AAPL,101.0,0.01,0.01,1000\n"
        "2016-01-04,AAPL,100.5,0.01,0.009,1000\n");
    try {
        load_universe(file);
        FAIL("expected DuplicateBar");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DuplicateBar);
        const std::string what = e.what();
        CHECK(what.find("lines 2 and 4") != std::string::npos);
        CHECK(what.find("AAPL") != std::string::npos);
    }
}

TEST_CASE("malformed rows report their line number") {
    TempDir tmp;
    const char* header = "date,security_id,close,ret_total,ret_capital,shares_out\n";

    SUBCASE("wrong field count") {
        const auto file =
            tmp.write("a.csv", std::string(header) + "2016-01-04,AAPL,100.0,0.01\n");
        CHECK_THROWS_WITH_AS(load_universe(file),
                             doctest::Contains(":2: expected 6 fields"), Error);
    }
    SUBCASE("bad date") {
        const auto file = tmp.write(
            "b.csv", std::string(header) + "2016-1-04,AAPL,100.0,0.01,0.01,10\n");
        CHECK_THROWS_WITH_AS(load_universe(file), doctest::Contains("bad date"),
                             Error);
    }
    SUBCASE("bad number") {
        const auto file = tmp.write(
            "c.csv", std::string(header) + "2016-01-04,AAPL,abc,0.01,0.01,10\n");
        CHECK_THROWS_WITH_AS(load_universe(file), doctest::Contains("bad close"),
                             Error);
    }
    SUBCASE("bad header") {
        const auto file = tmp.write("d.csv", "date,id,close\n");
        CHECK_THROWS_WITH_AS(load_universe(file),
                             doctest::Contains("expected header"), Error);
    }
    SUBCASE("zero price") {
        const auto file = tmp.write(
            "e.csv", std::string(header) + "2016-01-04,AAPL,0.0,0.01,0.01,10\n");
        try {
            load_universe(file);
            FAIL("expected NonPositivePrice");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonPositivePrice);
        }
    }
    SUBCASE("return ordering violated") {
        const auto file = tmp.write(
            "f.csv", std::string(header) + "2016-01-04,AAPL,10.0,0.01,0.02,10\n");
        try {
            load_universe(file);
            FAIL("expected MalformedRow");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MalformedRow);
            CHECK(std::string(e.what()).find("ret_total >= ret_capital") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("loading is idempotent") {
    TempDir tmp;
    const auto file = tmp.write("securities.csv", kSmallCsv);
    CHECK(load_universe(file) == load_universe(file));
}

TEST_CASE("constituency intervals gate membership") {
    UniverseBuilder builder;
    for (const Date d :
         {Date(1965, 6, 1), Date(1970, 1, 2)}) {
        builder.add_bar({"X", d, 10.0, 0.0, 0.0, 100.0});
        builder.add_bar({"Y", d, 20.0, 0.0, 0.0, 100.0});
    }
    builder.add_constituency("X", Date(1960, 1, 1), Date(1969, 12, 31));
    const auto u = builder.build();

    CHECK(u.constituents_at(Date(1965, 6, 1)) ==
          std::vector<SecurityId>{"X", "Y"});
    CHECK(u.constituents_at(Date(1970, 1, 2)) == std::vector<SecurityId>{"Y"});
    CHECK_THROWS_AS(u.constituents_at(Date(1965, 6, 2)), Error);
}

TEST_CASE("a security without a bar drops out for that date only") {
    UniverseBuilder builder;
    builder.add_bar({"A", Date(2016, 1, 4), 10.0, 0.0, 0.0, 1.0});
    builder.add_bar({"A", Date(2016, 1, 5), 10.0, 0.0, 0.0, 1.0});
    builder.add_bar({"B", Date(2016, 1, 5), 10.0, 0.0, 0.0, 1.0});
    builder.add_constituency("A", Date(2016, 1, 1), std::nullopt);
    builder.add_constituency("B", Date(2016, 1, 1), std::nullopt);
    const auto u = builder.build();

    CHECK(u.constituents_at(Date(2016, 1, 4)) == std::vector<SecurityId>{"A"});
    CHECK(u.constituents_at(Date(2016, 1, 5)) ==
          std::vector<SecurityId>{"A", "B"});
}

TEST_CASE("overlapping constituency intervals are rejected") {
    UniverseBuilder builder;
    builder.add_bar({"A", Date(2016, 1, 4), 10.0, 0.0, 0.0, 1.0});
    builder.add_constituency("A", Date(2016, 1, 1), Date(2016, 6, 30));
    builder.add_constituency("A", Date(2016, 6, 30), std::nullopt);
    CHECK_THROWS_WITH_AS(builder.build(), doctest::Contains("overlapping"),
                         Error);
}

TEST_CASE("calendar gaps longer than a week only warn") {
    UniverseBuilder builder;
    builder.add_bar({"A", Date(2016, 1, 4), 10.0, 0.0, 0.0, 1.0});
    builder.add_bar({"A", Date(2016, 1, 20), 10.0, 0.0, 0.0, 1.0});
    std::vector<std::string> warnings;
    builder.build(&warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("calendar gap of 16 days") != std::string::npos);
}

TEST_CASE("generated 500-security universe has full constituency everywhere") {
    SynthSpec spec;
    spec.seed = 7;
    spec.n_securities = 500;
    spec.n_years = 1;
    const auto data = generate(spec);

    TempDir tmp;
    save_universe(data.universe, tmp.path());
    const auto u = load_universe(tmp.path());
    REQUIRE(u.securities().size() == 500);
    for (const Date d : u.calendar()) {
        CHECK(u.constituents_at(d).size() == 500);
    }
}

TEST_CASE("deflation follows the CPI ratio") {
    const auto cpi = paper_ratio_cpi();

    SUBCASE("identity month") {
        CHECK(deflate(123.45, {1970, 5}, {1970, 5}, cpi) == 123.45);
    }
    SUBCASE("published 1958 to 2016 conversion") {
        CHECK(deflate(100000.0, {1958, 1}, {2016, 12}, cpi) ==
              doctest::Approx(828377.6).epsilon(1e-7));
    }
    SUBCASE("reciprocal direction") {
        CHECK(deflate(1.0, {2016, 12}, {1958, 1}, cpi) ==
              doctest::Approx(0.120718).epsilon(1e-5));
    }
    SUBCASE("missing month") {
        CHECK_THROWS_AS(deflate(1.0, {1957, 12}, {2016, 12}, cpi), Error);
    }
    SUBCASE("round trip within 1e-12 relative") {
        const YearMonth months[] = {{1958, 1}, {1999, 7}, {2016, 12}};
        const double amounts[] = {0.01, 1.0, 100000.0, 12345.6789};
        for (const auto m1 : months) {
            for (const auto m2 : months) {
                for (const double x : amounts) {
                    const double back = deflate(deflate(x, m1, m2, cpi), m2, m1, cpi);
                    CHECK(back == doctest::Approx(x).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("CPI CSV loads, validates, and round-trips") {
    TempDir tmp;
    SUBCASE("well-formed") {
        const auto file = tmp.write("cpi.csv",
                                    "year_month,cpi\n"
                                    "2016-10,241.729\n"
                                    "2016-11,241.353\n"
                                    "2016-12,241.432\n");
        const auto cpi = load_cpi(file);
        CHECK(cpi.at({2016, 12}) == 241.432);
        CHECK(cpi.first_month() == YearMonth{2016, 10});

        save_cpi(cpi, tmp.path() / "copy.csv");
        CHECK(load_cpi(tmp.path() / "copy.csv") == cpi);
    }
    SUBCASE("gap in coverage") {
        const auto file = tmp.write("gap.csv",
                                    "year_month,cpi\n"
                                    "2016-10,241.729\n"
                                    "2016-12,241.432\n");
        try {
            load_cpi(file);
            FAIL("expected MonthMissing");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MonthMissing);
        }
    }
    SUBCASE("non-positive level") {
        const auto file = tmp.write("bad.csv",
                                    "year_month,cpi\n"
                                    "2016-10,0\n");
        CHECK_THROWS_AS(load_cpi(file), Error);
    }
}

TEST_CASE("universe CSV round-trip preserves full double precision") {
    UniverseBuilder builder;
    builder.add_bar({"A", Date(2016, 1, 4), 1.0 / 3.0, 0.1234567890123456,
                     -0.0000000001, 7e7 + 0.25});
    builder.add_bar({"B", Date(2016, 1, 4), 99.99999999999999, 0.0, 0.0, 1.0});
    builder.add_constituency("B", Date(2015, 12, 31), Date(2016, 1, 4));
    const auto u = builder.build();

    TempDir tmp;
    save_universe(u, tmp.path());
    CHECK(load_universe(tmp.path()) == u);
}

TEST_CASE("directory loading picks up the constituency file") {
    TempDir tmp;
    tmp.write("securities.csv", kSmallCsv);
    tmp.write("constituency.csv",
              "security_id,start_date,end_date\n"
              "AAPL,2016-01-01,\n"
              "MSFT,2016-01-01,2016-01-04\n");
    const auto u = load_universe(tmp.path());
    CHECK(u.constituents_at(Date(2016, 1, 4)) ==
          std::vector<SecurityId>{"AAPL", "MSFT"});
    // MSFT's membership ended 2016-01-04; no bar on the 5th anyway
    CHECK(u.constituents_at(Date(2016, 1, 5)) ==
          std::vector<SecurityId>{"AAPL"});
}
