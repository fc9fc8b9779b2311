#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "temp_dir.hpp"

namespace fs = std::filesystem;

namespace {

/// Exit status of the backtester binary run with `args`, with stdout and
/// stderr captured into files under `dir`.
int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = std::string(BACKTESTER_CLI_PATH) + " " + args +
                            " > " + (dir / "stdout.txt").string() + " 2> " +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

const char* kSmallSynth = " --seed 3 --synth-securities 12 --synth-years 3 ";

}  // namespace

TEST_CASE("backtest writes the contracted files") {
    TempDir dir;
    const auto out = dir.path() / "out";
    const int code = run_cli(
        dir.path(), std::string("backtest") + kSmallSynth +
                        "--strategy equ --strategy mkc --out " + out.string());
    CHECK(code == 0);

    for (const char* name :
         {"equ_values.csv", "mkc_values.csv", "equ_trades.csv", "mkc_trades.csv",
          "equ_annual.csv", "mkc_annual.csv", "final_values.csv", "fees.csv",
          "cumulative.svg"}) {
        CAPTURE(name);
        CHECK(fs::exists(out / name));
    }
    const auto summary = slurp(dir.path() / "stdout.txt");
    CHECK(summary.find("equ: final $") != std::string::npos);
    CHECK(summary.find("mkc: final $") != std::string::npos);
    CHECK(summary.find(" mil") != std::string::npos);
}

TEST_CASE("backtest output is byte-identical across runs") {
    TempDir dir;
    const auto out1 = dir.path() / "one";
    const auto out2 = dir.path() / "two";
    const std::string base = std::string("backtest") + kSmallSynth +
                             "--strategy mkc --strategy basket:middle --k 3 --out ";
    REQUIRE(run_cli(dir.path(), base + out1.string()) == 0);
    REQUIRE(run_cli(dir.path(), base + out2.string()) == 0);
    for (const char* name : {"mkc_values.csv", "basket_middle_equ_k3_values.csv",
                             "final_values.csv", "fees.csv", "cumulative.svg"}) {
        CAPTURE(name);
        CHECK(slurp(out1 / name) == slurp(out2 / name));
    }
}

TEST_CASE("maxmedian runs log their selections") {
    TempDir dir;
    const auto out = dir.path() / "out";
    const int code = run_cli(dir.path(), std::string("backtest") + kSmallSynth +
                                             "--strategy maxmedian --k 3 "
                                             "--start 2001-01-01 --out " +
                                             out.string());
    CHECK(code == 0);
    const auto selections = slurp(out / "maxmedian_k3_selections.csv");
    std::size_t rows = 0;
    for (char c : selections) rows += c == '\n';
    CHECK(rows == 7);  // header + 3 picks for each of 2001 and 2002
    CHECK(selections.rfind("year,rank,security_id,median_ratio\n", 0) == 0);
}

TEST_CASE("select prints ranked picks and the tie rule") {
    TempDir dir;
    const int code =
        run_cli(dir.path(), std::string("select") + kSmallSynth + "--year 2001 --k 4");
    CHECK(code == 0);
    const auto out = slurp(dir.path() / "stdout.txt");
    CHECK(out.find("picks for 2001") != std::string::npos);
    CHECK(out.find("  1  SYN") != std::string::npos);
    CHECK(out.find("  4  SYN") != std::string::npos);
    CHECK(out.find("equal medians break ties by security id, ascending") !=
          std::string::npos);
}

TEST_CASE("validate-data round-trips synthetic data") {
    TempDir dir;
    const int code = run_cli(dir.path(), std::string("validate-data") + kSmallSynth);
    CHECK(code == 0);
    const auto out = slurp(dir.path() / "stdout.txt");
    CHECK(out.find("securities: 12") != std::string::npos);
    CHECK(out.find("round-trip: ok") != std::string::npos);
}

TEST_CASE("select with too large a k names the eligible count") {
    TempDir dir;
    const int code =
        run_cli(dir.path(), std::string("select") + kSmallSynth + "--year 2001 --k 50");
    CHECK(code == 3);
    const auto err = slurp(dir.path() / "stderr.txt");
    CHECK(err.find("InsufficientEligibleSecurities") != std::string::npos);
    CHECK(err.find("needs 50 eligible securities, found") != std::string::npos);
}

TEST_CASE("a missing data file is a data error") {
    TempDir dir;
    const int code =
        run_cli(dir.path(), "backtest --data " +
                                (dir.path() / "does_not_exist.csv").string());
    CHECK(code == 2);
    const auto err = slurp(dir.path() / "stderr.txt");
    CHECK(err.rfind("error: ", 0) == 0);
    CHECK(err.find('\n') == err.size() - 1);  // single line
}

TEST_CASE("an infeasible strategy is reported as such") {
    TempDir dir;
    // 12 securities cannot support a 20-wide basket
    const int code = run_cli(dir.path(), std::string("backtest") + kSmallSynth +
                                             "--strategy basket --out " +
                                             (dir.path() / "out").string());
    CHECK(code == 3);
    const auto err = slurp(dir.path() / "stderr.txt");
    CHECK(err.find("UniverseTooSmall") != std::string::npos);
}
