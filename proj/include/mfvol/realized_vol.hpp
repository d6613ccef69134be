#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfvol/marketdata.hpp"

namespace mfvol::realized_vol {

/// Percent log return 100 * (ln p - ln p_prev).
double daily_return(double price, double prev_price);

/// Sum of squared consecutive percent log returns over one day's bars, in
/// time order. The first bar is the base price; the overnight move is excluded.
double realized_variance(std::span<const double> day_prices);

/// mean(R^2) / mean(RV).
double scale_parameter(std::span<const double> daily_returns, std::span<const double> rv);

std::vector<double> adjust_rv(std::span<const double> rv, double lambda);

/// Sum of squared daily returns per month. `month_index` is nondecreasing and
/// must cover a contiguous range of months; the result is indexed from the
/// first month present.
std::vector<double> monthly_rv(std::span<const double> daily_returns,
                               std::span<const std::size_t> month_index);

struct RvSeries {
  std::vector<std::string> dates;
  std::vector<double> ret;     // close-to-close percent log return
  std::vector<double> rv;      // raw 5-minute realized variance
  std::vector<double> rv_adj;  // lambda * rv
  std::vector<std::size_t> bars;  // bar count of each day (< 48 flags a partial day)
  double lambda = 1.0;
  std::size_t lambda_days = 0;  // leading days used to estimate lambda

  std::size_t incomplete_days() const;
};

/// Builds the daily RV table from intraday bars. The first trading day has no
/// prior close and is dropped. Lambda is estimated on the first
/// `lambda_days` rows (all rows when unset).
RvSeries compute(const marketdata::IntradaySeries& series,
                 std::optional<std::size_t> lambda_days = std::nullopt);

void save(const RvSeries& rv, const std::filesystem::path& csv_path,
          const std::filesystem::path& json_path);
/// Reads back `date,ret,rv,rv_adj`; lambda comes from the sidecar when present.
RvSeries load(const std::filesystem::path& csv_path,
              const std::filesystem::path& json_path = {});

}  // namespace mfvol::realized_vol
