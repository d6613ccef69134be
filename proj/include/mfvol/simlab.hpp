#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfvol/garch_midas.hpp"
#include "mfvol/marketdata.hpp"

namespace mfvol::simlab {

struct IntradayOptions {
  std::size_t bars_per_day = marketdata::kMaxBarsPerDay;
  double overnight_share = 0.2;  // fraction of each day's variance realized before the open
  double start_price = 3000.0;
};

/// Five-minute geometric random walk. Day d has total percent-return variance
/// `variance[d]`; when `returns` is non-empty the bars are drawn conditionally
/// on the close-to-close percent log return being exactly `returns[d]`.
/// Realized variance of day d then has expectation (1 - q) * variance[d].
marketdata::IntradaySeries gen_intraday(std::span<const std::string> dates,
                                        std::span<const double> variance,
                                        std::span<const double> returns,
                                        const IntradayOptions& options, std::uint64_t seed);

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t months = 144;  // monthly records, the first `lags` of which are warm-up only
  std::size_t days_per_month = 21;
  std::string start_month = "2012-01";
  IntradayOptions intraday;

  std::size_t lags = 12;
  garch_midas::MidasParams params = default_params();
  double covariate_ar = 0.8;

  // Attention factor a_d is AR(1) with unit variance. Day d's return variance
  // is h_d * exp(attention_coef * a_{d-1} - attention_coef^2 / 2).
  double attention_ar = 0.9;
  double attention_coef = 0.3;
  double macro_noise = 0.3;
  double attention_noise = 0.3;

  static garch_midas::MidasParams default_params();
  garch_midas::MidasSpec midas_spec() const;
  void validate() const;
};

struct Truth {
  garch_midas::MidasSpec spec;
  garch_midas::MidasParams params;
  std::vector<std::string> dates;  // modeled trading days
  std::vector<double> returns, tau, g, h, variance, multiplier, attention_factor;
  std::vector<std::vector<double>> covariates;  // latent macro factors per month
  std::vector<std::array<double, 2>> macro_loadings;
};

struct Scenario {
  ScenarioSpec spec;
  marketdata::IntradaySeries intraday;
  std::vector<marketdata::DailyRecord> daily;
  std::vector<marketdata::MonthlyRecord> monthly;
  std::vector<marketdata::AttentionRecord> attention;
  Truth truth;
};

/// Deterministic in (spec, spec.seed).
Scenario gen_full_scenario(const ScenarioSpec& spec);

/// Computes the derived columns (turn, boll, ma5, ma20, macd, rsi, sobv, roc)
/// of `daily` from its prices and volumes.
void fill_technical_indicators(std::vector<marketdata::DailyRecord>& daily);

nlohmann::ordered_json to_json(const Truth& truth, const ScenarioSpec& spec);

/// intraday.csv, daily.csv, monthly.csv, attention.csv and truth.json.
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

}  // namespace mfvol::simlab
