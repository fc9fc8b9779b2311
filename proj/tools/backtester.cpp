#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bt/analytics.hpp"
#include "bt/index_engine.hpp"
#include "bt/report.hpp"
#include "bt/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct DataOptions {
    std::string data_path;
    std::string cpi_path;
    std::uint64_t seed = 0;
    bool have_seed = false;
    int synth_securities = 30;
    int synth_years = 10;
};

void add_data_options(CLI::App* cmd, DataOptions& opt) {
    auto* data = cmd->add_option("--data", opt.data_path,
                                 "securities CSV file, or directory with "
                                 "securities.csv / constituency.csv / cpi.csv")
                     ->envname("BACKTESTER_DATA");
    cmd->add_option("--cpi", opt.cpi_path, "CPI CSV (year_month,cpi)");
    auto* seed = cmd->add_option("--seed", opt.seed,
                                 "generate a synthetic universe instead of "
                                 "loading --data");
    cmd->add_option("--synth-securities", opt.synth_securities,
                    "synthetic mode: number of securities")
        ->needs(seed);
    cmd->add_option("--synth-years", opt.synth_years,
                    "synthetic mode: number of calendar years")
        ->needs(seed);
    seed->excludes(data);
}

bt::SynthData load_or_generate(const DataOptions& opt,
                               std::vector<std::string>* warnings) {
    if (opt.have_seed) {
        bt::SynthSpec spec;
        spec.seed = opt.seed;
        spec.n_securities = opt.synth_securities;
        spec.n_years = opt.synth_years;
        spec.dividend_yield = 0.02;
        spec.split_probability = 0.001;
        spec.churn_rate = 0.1;
        spec.missing_bar_probability = 0.002;
        return bt::generate(spec);
    }
    if (opt.data_path.empty()) {
        throw bt::Error(bt::ErrorKind::Io,
                        "no input: give --data (or BACKTESTER_DATA) or --seed");
    }
    bt::SynthData data;
    data.universe = bt::load_universe(opt.data_path, warnings);
    fs::path cpi = opt.cpi_path;
    if (cpi.empty() && fs::is_directory(opt.data_path)) {
        const fs::path candidate = fs::path(opt.data_path) / "cpi.csv";
        if (fs::exists(candidate)) cpi = candidate;
    }
    if (!cpi.empty()) data.cpi = bt::load_cpi(cpi);
    return data;
}

bt::Date parse_date_flag(const std::string& value, const char* flag) {
    const auto d = bt::Date::from_string(value);
    if (!d) {
        throw bt::Error(bt::ErrorKind::InvalidInput,
                        std::string(flag) + " wants YYYY-MM-DD, got '" + value + "'");
    }
    return *d;
}

bt::BasketZone parse_zone(const std::string& zone) {
    if (zone == "top") return bt::BasketZone::Top;
    if (zone == "middle") return bt::BasketZone::Middle;
    if (zone == "bottom") return bt::BasketZone::Bottom;
    throw bt::Error(bt::ErrorKind::InvalidInput,
                    "--zone wants top|middle|bottom, got '" + zone + "'");
}

bt::Weighting parse_weighting(const std::string& w) {
    if (w == "equ") return bt::Weighting::Equ;
    if (w == "mkc") return bt::Weighting::Mkc;
    throw bt::Error(bt::ErrorKind::InvalidInput,
                    "--basket-weighting wants equ|mkc, got '" + w + "'");
}

/// Accepts equ | mkc | maxmedian | basket (configured by --zone and
/// --basket-weighting)
/// | basket:<zone>:<weighting> for several baskets in one run.
bt::StrategySpec parse_strategy(const std::string& token,
                                const std::string& default_zone,
                                const std::string& default_weighting, int k) {
    if (token == "equ") return bt::StrategySpec::equ();
    if (token == "mkc") return bt::StrategySpec::mkc();
    if (token == "maxmedian") return bt::StrategySpec::max_median(k);
    if (token == "basket") {
        return bt::StrategySpec::basket(parse_zone(default_zone),
                                        parse_weighting(default_weighting), k);
    }
    if (token.rfind("basket:", 0) == 0) {
        const auto rest = token.substr(7);
        const auto colon = rest.find(':');
        const std::string zone = rest.substr(0, colon);
        const std::string weighting =
            colon == std::string::npos ? default_weighting : rest.substr(colon + 1);
        return bt::StrategySpec::basket(parse_zone(zone), parse_weighting(weighting), k);
    }
    throw bt::Error(bt::ErrorKind::InvalidInput,
                    "--strategy wants equ|mkc|maxmedian|basket[:zone[:weighting]], "
                    "got '" + token + "'");
}

std::string mil(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "$%.2f mil", v / 1e6);
    return buf;
}

int cmd_backtest(const DataOptions& data_opt,
                 const std::vector<std::string>& strategy_tokens,
                 const std::string& zone, const std::string& weighting, int k,
                 const std::string& start_str, const std::string& end_str,
                 double initial, double admin_fee, double spread_bps,
                 double risk_free, const std::string& out_dir, bool linear) {
    std::vector<std::string> load_warnings;
    const bt::SynthData data = load_or_generate(data_opt, &load_warnings);
    for (const auto& w : load_warnings) std::cerr << "warning: " << w << "\n";

    const auto& calendar = data.universe.calendar();
    if (calendar.empty()) {
        throw bt::Error(bt::ErrorKind::Io, "universe has no trading days");
    }

    bt::BacktestConfig config;
    config.start = start_str.empty() ? calendar.front()
                                     : parse_date_flag(start_str, "--start");
    config.end =
        end_str.empty() ? calendar.back() : parse_date_flag(end_str, "--end");
    config.initial = initial;
    config.fees.admin_fee_ref = admin_fee;
    config.fees.spread_fraction = spread_bps / 10000.0;

    if ((config.fees.admin_fee_ref != 0.0) && data.cpi.empty()) {
        throw bt::Error(bt::ErrorKind::MonthMissing,
                        "the admin fee needs a CPI series; give --cpi or "
                        "--admin-fee 0");
    }

    std::vector<bt::StrategySpec> strategies;
    for (const auto& token : strategy_tokens) {
        strategies.push_back(parse_strategy(token, zone, weighting, k));
    }

    const fs::path out(out_dir);
    std::vector<bt::BacktestResult> results;
    for (const auto& spec : strategies) {
        bt::BacktestResult r =
            bt::run_backtest(data.universe, data.cpi, spec, config);
        const std::string label = r.strategy.label();

        bt::write_values_csv(r, out / (label + "_values.csv"));
        bt::write_trades_csv(r, out / (label + "_trades.csv"));
        if (!r.selections.empty()) {
            bt::write_selections_csv(r, out / (label + "_selections.csv"));
        }

        const auto per_year = bt::annual_returns(r);
        try {
            const bt::AnnualStats stats = bt::summarize(per_year, risk_free);
            bt::write_annual_csv(per_year, &stats, out / (label + "_annual.csv"));
        } catch (const bt::Error& e) {
            if (e.kind() != bt::ErrorKind::DegenerateSeries) throw;
            bt::write_annual_csv(per_year, nullptr, out / (label + "_annual.csv"));
            std::cerr << "warning: " << label << ": " << e.what()
                      << "; summary statistics omitted\n";
        }

        for (const auto& w : r.warnings) {
            std::cerr << "warning: " << label << ": " << w << "\n";
        }
        results.push_back(std::move(r));
    }

    bt::write_final_values_csv(results, out / "final_values.csv");
    bt::write_fees_csv(results, out / "fees.csv");
    bt::write_cumulative_svg(results, out / "cumulative.svg", !linear);

    std::cout << "backtest " << config.start.to_string() << " .. "
              << config.end.to_string() << ", initial " << mil(initial) << "\n";
    for (const auto& r : results) {
        const auto& f = r.fee_totals;
        std::cout << "  " << r.strategy.label() << ": final "
                  << mil(r.final_value()) << " (" << r.trades.size()
                  << " trades, fees " << mil(f.admin_nominal + f.spread_nominal)
                  << " nominal)\n";
    }
    std::cout << "wrote " << (results.size() * 2 + 2) << "+ files under "
              << out.string() << "\n";
    return 0;
}

int cmd_select(const DataOptions& data_opt, int year, int k) {
    const bt::SynthData data = load_or_generate(data_opt, nullptr);
    const auto selection_date = data.universe.first_trading_day_of_year(year);
    if (!selection_date) {
        throw bt::Error(bt::ErrorKind::DateNotInCalendar,
                        "no trading days in " + std::to_string(year));
    }
    const auto picks = bt::maxmedian_ranking(data.universe, *selection_date, k);
    std::cout << "picks for " << year << " (selected on "
              << selection_date->to_string() << ", ratios from "
              << year - 1 << ")\n";
    int rank = 1;
    for (const auto& pick : picks) {
        std::printf("%3d  %-12s  %.9f\n", rank++, pick.security.c_str(),
                    pick.median);
    }
    std::cout << "equal medians break ties by security id, ascending\n";
    return 0;
}

int cmd_validate(const DataOptions& data_opt) {
    std::vector<std::string> warnings;
    const bt::SynthData data = load_or_generate(data_opt, &warnings);
    const auto& u = data.universe;

    // round-trip: write what we loaded, load it again, demand equality
    const fs::path tmp =
        fs::temp_directory_path() /
        ("backtester-validate-" + std::to_string(::getpid()));
    bt::save_universe(u, tmp);
    if (!data.cpi.empty()) bt::save_cpi(data.cpi, tmp / "cpi.csv");
    const bt::MarketUniverse reloaded = bt::load_universe(tmp);
    bool cpi_ok = true;
    if (!data.cpi.empty()) {
        cpi_ok = bt::load_cpi(tmp / "cpi.csv") == data.cpi;
    }
    fs::remove_all(tmp);
    if (!(reloaded == u) || !cpi_ok) {
        throw bt::Error(bt::ErrorKind::Io,
                        "round-trip mismatch: saved copy differs after reload");
    }

    for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
    std::cout << "securities: " << u.securities().size() << "\n";
    std::cout << "bars: " << u.total_bars() << "\n";
    if (!u.calendar().empty()) {
        std::cout << "calendar: " << u.calendar().front().to_string() << " .. "
                  << u.calendar().back().to_string() << " ("
                  << u.calendar().size() << " trading days)\n";
    }
    if (!data.cpi.empty()) {
        std::cout << "cpi: " << data.cpi.first_month().to_string() << " .. "
                  << data.cpi.last_month().to_string() << "\n";
    }
    std::cout << "round-trip: ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic daily portfolio backtester"};
    app.require_subcommand(1);

    DataOptions data_opt;

    auto* backtest = app.add_subcommand("backtest", "run strategies and write reports");
    std::vector<std::string> strategy_tokens{"equ"};
    std::string zone = "top", weighting = "equ";
    int k = 20;
    std::string start_str, end_str, out_dir = "out";
    double initial = 100000.0, admin_fee = 1.0, spread_bps = 10.0,
           risk_free = 1.75;
    bool linear = false;
    add_data_options(backtest, data_opt);
    backtest->add_option("--strategy", strategy_tokens,
                         "equ | mkc | maxmedian | basket[:zone[:weighting]]; repeatable");
    backtest->add_option("--zone", zone, "basket zone: top|middle|bottom");
    backtest->add_option("--basket-weighting", weighting, "basket weighting: equ|mkc");
    backtest->add_option("--k", k, "selection size for basket/maxmedian")
        ->check(CLI::PositiveNumber);
    backtest->add_option("--start", start_str, "first trading date (YYYY-MM-DD)");
    backtest->add_option("--end", end_str, "last trading date (YYYY-MM-DD)");
    backtest->add_option("--initial", initial, "initial capital in USD")
        ->check(CLI::PositiveNumber);
    backtest->add_option("--admin-fee", admin_fee,
                         "per-trade admin fee in reference-month dollars");
    backtest->add_option("--spread-bps", spread_bps,
                         "bid-ask spread in basis points (half is charged)");
    backtest->add_option("--risk-free", risk_free, "risk-free rate in percent");
    backtest->add_option("--out", out_dir, "output directory");
    backtest->add_flag("--linear", linear, "linear y-axis for the chart");

    auto* select = app.add_subcommand("select", "print MaxMedian picks for a year");
    int select_year = 0;
    int select_k = 20;
    add_data_options(select, data_opt);
    select->add_option("--year", select_year, "selection year")->required();
    select->add_option("--k", select_k, "number of picks")
        ->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate-data",
                                        "load, round-trip and summarize a data set");
    add_data_options(validate, data_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    data_opt.have_seed = backtest->count("--seed") || select->count("--seed") ||
                         validate->count("--seed");

    try {
        if (backtest->parsed()) {
            return cmd_backtest(data_opt, strategy_tokens, zone, weighting, k,
                                start_str, end_str, initial, admin_fee,
                                spread_bps, risk_free, out_dir, linear);
        }
        if (select->parsed()) {
            return cmd_select(data_opt, select_year, select_k);
        }
        return cmd_validate(data_opt);
    } catch (const bt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bt::is_data_error(e.kind()) ? 2 : 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: InvalidInput: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
