#include "mfvol/realized_vol.hpp"

#include <cmath>

#include "json.hpp"
#include "mfvol/csv.hpp"
#include "mfvol/error.hpp"

namespace mfvol::realized_vol {

double daily_return(double price, double prev_price) {
  if (!(price > 0.0) || !(prev_price > 0.0))
    fail(Errc::NonPositivePrice, "daily_return needs positive prices");
  return 100.0 * (std::log(price) - std::log(prev_price));
}

double realized_variance(std::span<const double> day_prices) {
  if (day_prices.size() < 2)
    fail(Errc::InsufficientBars, "need at least 2 bars, got " + std::to_string(day_prices.size()));
  double rv = 0.0;
  for (std::size_t d = 1; d < day_prices.size(); ++d) {
    const double r = daily_return(day_prices[d], day_prices[d - 1]);
    rv += r * r;
  }
  return rv;
}

double scale_parameter(std::span<const double> daily_returns, std::span<const double> rv) {
  if (daily_returns.size() != rv.size() || rv.empty())
    fail(Errc::LengthMismatch, "returns and RV must have the same nonzero length");
  double sum_r2 = 0.0, sum_rv = 0.0;
  for (std::size_t t = 0; t < rv.size(); ++t) {
    sum_r2 += daily_returns[t] * daily_returns[t];
    sum_rv += rv[t];
  }
  if (!(sum_rv > 0.0)) fail(Errc::ZeroRvSum, "sum of RV is not positive");
  const double n = static_cast<double>(rv.size());
  return (sum_r2 / n) / (sum_rv / n);
}

std::vector<double> adjust_rv(std::span<const double> rv, double lambda) {
  if (!(lambda > 0.0)) fail(Errc::NonPositiveLambda, std::to_string(lambda));
  std::vector<double> out(rv.begin(), rv.end());
  for (auto& x : out) x *= lambda;
  return out;
}

std::vector<double> monthly_rv(std::span<const double> daily_returns,
                               std::span<const std::size_t> month_index) {
  if (daily_returns.size() != month_index.size())
    fail(Errc::LengthMismatch, "returns and month indices differ in length");
  if (daily_returns.empty()) return {};
  const std::size_t first = month_index.front();
  std::vector<double> out;
  std::vector<std::size_t> count;
  for (std::size_t d = 0; d < daily_returns.size(); ++d) {
    if (d > 0 && month_index[d] < month_index[d - 1])
      fail(Errc::BadShape, "month indices must be nondecreasing");
    const std::size_t m = month_index[d] - first;
    if (m >= out.size()) {
      out.resize(m + 1, 0.0);
      count.resize(m + 1, 0);
    }
    out[m] += daily_returns[d] * daily_returns[d];
    ++count[m];
  }
  for (std::size_t m = 0; m < count.size(); ++m)
    if (count[m] == 0) fail(Errc::EmptyMonth, "month " + std::to_string(first + m) + " has no days");
  return out;
}

std::size_t RvSeries::incomplete_days() const {
  std::size_t n = 0;
  for (auto b : bars) n += b < marketdata::kMaxBarsPerDay;
  return n;
}

RvSeries compute(const marketdata::IntradaySeries& series, std::optional<std::size_t> lambda_days) {
  const auto days = series.days();
  RvSeries out;
  std::vector<double> prices;
  for (std::size_t k = 1; k < days.size(); ++k) {
    const auto& day = days[k];
    prices.clear();
    for (std::size_t b = day.begin; b < day.end; ++b) prices.push_back(series.bars[b].price);
    const double prev_close = series.bars[days[k - 1].end - 1].price;
    out.dates.push_back(day.date);
    out.ret.push_back(daily_return(prices.back(), prev_close));
    out.rv.push_back(realized_variance(prices));
    out.bars.push_back(day.end - day.begin);
  }
  if (out.dates.empty()) fail(Errc::InsufficientBars, "need at least two trading days");
  const std::size_t n = std::min(lambda_days.value_or(out.rv.size()), out.rv.size());
  if (n == 0) fail(Errc::EmptyPanel, "no days available to estimate lambda");
  out.lambda_days = n;
  out.lambda = scale_parameter(std::span(out.ret).first(n), std::span(out.rv).first(n));
  out.rv_adj = adjust_rv(out.rv, out.lambda);
  return out;
}

void save(const RvSeries& rv, const std::filesystem::path& csv_path,
          const std::filesystem::path& json_path) {
  csv::Writer w({"date", "ret", "rv", "rv_adj"});
  for (std::size_t t = 0; t < rv.dates.size(); ++t)
    w.row({rv.dates[t], csv::format(rv.ret[t]), csv::format(rv.rv[t]), csv::format(rv.rv_adj[t])});
  w.save(csv_path);
  nlohmann::ordered_json j;
  j["lambda"] = rv.lambda;
  j["n_days"] = rv.dates.size();
  j["lambda_days"] = rv.lambda_days;
  j["incomplete_days"] = rv.incomplete_days();
  csv::write_text(json_path, j.dump(2) + "\n");
}

RvSeries load(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  const auto table = csv::read(csv_path, {"date", "ret", "rv", "rv_adj"});
  RvSeries out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const auto line = table.line_numbers[r];
    out.dates.push_back(f[0]);
    out.ret.push_back(csv::parse_number(f[1], line, false));
    out.rv.push_back(csv::parse_number(f[2], line, false));
    out.rv_adj.push_back(csv::parse_number(f[3], line, false));
    out.bars.push_back(marketdata::kMaxBarsPerDay);
  }
  out.lambda_days = out.dates.size();
  if (!json_path.empty()) {
    const auto j = nlohmann::json::parse(csv::read_text(json_path));
    out.lambda = j.at("lambda").get<double>();
    out.lambda_days = j.value("lambda_days", out.dates.size());
  }
  return out;
}

}  // namespace mfvol::realized_vol
