#include "mfvol/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mfvol/csv.hpp"
#include "mfvol/error.hpp"

namespace mfvol::simlab {

namespace md = marketdata;
namespace gm = garch_midas;

namespace {

// Each macro indicator is level + scale * (loading . factors + noise).
constexpr std::array<std::array<double, 2>, 10> kMacroLoadings = {{
    {0.9, 0.1}, {0.8, -0.2}, {0.7, 0.3}, {-0.6, 0.2}, {0.5, 0.5},
    {0.1, 0.9}, {-0.2, 0.8}, {0.3, -0.7}, {0.2, 0.6}, {0.6, -0.4},
}};
constexpr std::array<double, 10> kMacroLevel = {100, 98, 101, 102.5, 109, 101.5, 100.2, 97, 8.5, 105};
constexpr std::array<double, 10> kMacroScale = {3, 2, 2.5, 0.8, 2, 0.6, 1.5, 2.5, 1.2, 1.5};

constexpr std::array<double, 5> kAttentionBase = {5200, 3100, 2400, 900, 650};

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

std::string day_label(const std::string& month, std::size_t day) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "-%02u", static_cast<unsigned>(day % 100));
  return month + buf;
}

double window_mean(const std::vector<double>& x, std::size_t end, std::size_t width) {
  const std::size_t begin = end + 1 >= width ? end + 1 - width : 0;
  double s = 0.0;
  for (std::size_t i = begin; i <= end; ++i) s += x[i];
  return s / static_cast<double>(end + 1 - begin);
}

double window_std(const std::vector<double>& x, std::size_t end, std::size_t width) {
  const std::size_t begin = end + 1 >= width ? end + 1 - width : 0;
  const double m = window_mean(x, end, width);
  double s = 0.0;
  for (std::size_t i = begin; i <= end; ++i) s += (x[i] - m) * (x[i] - m);
  return std::sqrt(s / static_cast<double>(end + 1 - begin));
}

}  // namespace

md::IntradaySeries gen_intraday(std::span<const std::string> dates, std::span<const double> variance,
                                std::span<const double> returns, const IntradayOptions& options,
                                std::uint64_t seed) {
  if (dates.size() != variance.size() || (!returns.empty() && returns.size() != variance.size()))
    fail(Errc::BadSpec, "dates, variances and returns must have equal lengths");
  if (options.bars_per_day < 2 || options.bars_per_day > md::kMaxBarsPerDay)
    fail(Errc::BadSpec, "bars per day must be in [2, 48]");
  if (!(options.overnight_share >= 0.0 && options.overnight_share < 1.0))
    fail(Errc::BadSpec, "overnight share must be in [0, 1)");
  if (!(options.start_price > 0.0)) fail(Errc::BadSpec, "start price must be positive");

  std::mt19937_64 rng = stream(seed, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t steps = options.bars_per_day - 1;
  md::IntradaySeries series;
  series.instrument = "sim";
  double log_price = std::log(options.start_price);

  std::vector<double> part(steps + 1), var(steps + 1);
  for (std::size_t d = 0; d < dates.size(); ++d) {
    const double v = variance[d];
    if (!(v >= 0.0) || !std::isfinite(v)) fail(Errc::BadSpec, "daily variance must be finite and >= 0");
    var[0] = options.overnight_share * v;
    for (std::size_t i = 1; i <= steps; ++i) var[i] = (1.0 - options.overnight_share) * v / steps;
    double total = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      part[i] = std::sqrt(var[i]) * normal(rng);
      total += part[i];
    }
    if (!returns.empty() && v > 0.0) {
      // Gaussian bridge: shift each piece in proportion to its variance.
      const double gap = returns[d] - total;
      for (std::size_t i = 0; i <= steps; ++i) part[i] += var[i] / v * gap;
    }
    log_price += part[0] / 100.0;
    series.bars.push_back({dates[d], 0, std::exp(log_price)});
    for (std::size_t i = 1; i <= steps; ++i) {
      log_price += part[i] / 100.0;
      series.bars.push_back({dates[d], static_cast<int>(5 * i), std::exp(log_price)});
    }
  }
  return series;
}

gm::MidasParams ScenarioSpec::default_params() {
  gm::MidasParams p;
  p.mu = 0.0;
  p.alpha = 0.05;
  p.beta = 0.90;
  p.m = 0.0;
  p.theta = {0.5, -0.35};
  p.omega2 = {5.0, 3.0};
  p.omega1 = 1.0;
  return p;
}

gm::MidasSpec ScenarioSpec::midas_spec() const {
  return gm::make_spec(gm::LongRunMode::Exogenous, lags, params.theta.size());
}

void ScenarioSpec::validate() const {
  auto bad = [](const std::string& msg) { fail(Errc::BadSpec, msg); };
  if (months <= lags) bad("months must exceed the lag count");
  if (lags < 1) bad("lag count must be >= 1");
  if (days_per_month < 2 || days_per_month > 28) bad("days per month must be in [2, 28]");
  if (!md::is_iso_month(start_month)) bad("start month must be YYYY-MM");
  if (params.theta.empty() || params.theta.size() > 2) bad("the scenario draws one or two macro factors");
  if (!(std::abs(covariate_ar) < 1.0) || !(std::abs(attention_ar) < 1.0))
    bad("AR coefficients must be in (-1, 1)");
  if (!std::isfinite(attention_coef)) bad("attention coefficient must be finite");
  if (!(macro_noise >= 0.0) || !(attention_noise >= 0.0)) bad("noise scales must be >= 0");
  try {
    params.validate(midas_spec());
  } catch (const Error& e) {
    bad(e.what());
  }
}

void fill_technical_indicators(std::vector<md::DailyRecord>& daily) {
  const std::size_t n = daily.size();
  std::vector<double> close(n), volume(n);
  for (std::size_t i = 0; i < n; ++i) {
    close[i] = daily[i].close();
    volume[i] = daily[i].values[4];
  }
  double ema12 = close.empty() ? 0.0 : close[0], ema26 = ema12;
  double obv = 0.0;
  std::vector<double> obv_series(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = daily[i].values;
    v[5] = volume[i] / 1e8;  // turnover, percent of a fixed float
    v[6] = window_mean(close, i, 20) + 2.0 * window_std(close, i, 20);
    v[7] = window_mean(close, i, 5);
    v[8] = window_mean(close, i, 20);
    if (i > 0) {
      ema12 += 2.0 / 13.0 * (close[i] - ema12);
      ema26 += 2.0 / 27.0 * (close[i] - ema26);
    }
    v[9] = ema12 - ema26;

    double gain = 0.0, loss = 0.0;
    for (std::size_t k = i >= 14 ? i - 13 : 1; k <= i; ++k) {
      const double diff = close[k] - close[k - 1];
      (diff > 0 ? gain : loss) += std::abs(diff);
    }
    v[10] = gain + loss > 0.0 ? 100.0 * gain / (gain + loss) : 50.0;

    if (i > 0) obv += close[i] > close[i - 1] ? volume[i] : close[i] < close[i - 1] ? -volume[i] : 0.0;
    obv_series[i] = obv / 1e8;
    v[11] = window_mean(obv_series, i, 5);
    v[12] = 100.0 * (close[i] / close[i >= 12 ? i - 12 : 0] - 1.0);
  }
}

Scenario gen_full_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Scenario sc;
  sc.spec = spec;
  const std::size_t K = spec.lags;
  const std::size_t n_days = (spec.months - K) * spec.days_per_month;

  // Attention factor, one extra leading draw so day 0 has a lagged value.
  auto att_rng = stream(spec.seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double att_innov = std::sqrt(1.0 - spec.attention_ar * spec.attention_ar);
  std::vector<double> a(n_days + 1);
  a[0] = normal(att_rng);
  for (std::size_t d = 1; d <= n_days; ++d) a[d] = spec.attention_ar * a[d - 1] + att_innov * normal(att_rng);

  gm::SimulationOptions opts;
  opts.ar_coef = spec.covariate_ar;
  opts.variance_multiplier.resize(n_days);
  const double gamma = spec.attention_coef;
  for (std::size_t d = 0; d < n_days; ++d)
    opts.variance_multiplier[d] = std::exp(gamma * a[d] - 0.5 * gamma * gamma);

  const auto mspec = spec.midas_spec();
  auto sim = gm::simulate(mspec, spec.params, spec.months, spec.days_per_month, spec.seed, opts);

  // Calendar.
  std::vector<std::string> months(spec.months);
  months[0] = spec.start_month;
  for (std::size_t t = 1; t < spec.months; ++t) months[t] = md::next_month(months[t - 1]);
  std::vector<std::string> dates;
  for (std::size_t t = K; t < spec.months; ++t)
    for (std::size_t i = 1; i <= spec.days_per_month; ++i) dates.push_back(day_label(months[t], i));

  sc.intraday = gen_intraday(dates, sim.variance, sim.data.returns, spec.intraday, spec.seed);

  // Daily OHLC from the bars, plus volume and derived indicators.
  auto vol_rng = stream(spec.seed, 4);
  for (const auto& day : sc.intraday.days()) {
    md::DailyRecord rec;
    rec.date = day.date;
    double hi = -INFINITY, lo = INFINITY;
    for (std::size_t b = day.begin; b < day.end; ++b) {
      hi = std::max(hi, sc.intraday.bars[b].price);
      lo = std::min(lo, sc.intraday.bars[b].price);
    }
    rec.values[0] = sc.intraday.bars[day.begin].price;
    rec.values[1] = hi;
    rec.values[2] = lo;
    rec.values[3] = sc.intraday.bars[day.end - 1].price;
    rec.values[4] = std::round(std::exp(18.0 + 0.3 * normal(vol_rng)));
    sc.daily.push_back(rec);
  }
  fill_technical_indicators(sc.daily);

  auto macro_rng = stream(spec.seed, 3);
  for (std::size_t t = 0; t < spec.months; ++t) {
    md::MonthlyRecord rec;
    rec.month = months[t];
    for (std::size_t c = 0; c < kMacroLoadings.size(); ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < sim.data.covariates.size(); ++j)
        s += kMacroLoadings[c][j] * sim.data.covariates[j][t];
      s += spec.macro_noise * normal(macro_rng);
      rec.values[c] = kMacroLevel[c] + kMacroScale[c] * s;
    }
    sc.monthly.push_back(rec);
  }

  auto index_rng = stream(spec.seed, 5);
  for (std::size_t d = 0; d < n_days; ++d) {
    md::AttentionRecord rec;
    rec.date = dates[d];
    // Day d's search volume is the factor that scales day d + 1's variance.
    for (std::size_t c = 0; c < kAttentionBase.size(); ++c)
      rec.values[c] = std::round(kAttentionBase[c] *
                                 std::exp(0.25 * (a[d + 1] + spec.attention_noise * normal(index_rng))));
    sc.attention.push_back(rec);
  }

  auto& tr = sc.truth;
  tr.spec = mspec;
  tr.params = spec.params;
  tr.dates = dates;
  tr.returns = sim.data.returns;
  tr.tau = sim.tau;
  tr.g = sim.g;
  tr.h = sim.h;
  tr.variance = sim.variance;
  tr.multiplier = opts.variance_multiplier;
  tr.attention_factor.assign(a.begin() + 1, a.end());
  tr.covariates = sim.data.covariates;
  tr.macro_loadings.assign(kMacroLoadings.begin(), kMacroLoadings.end());
  return sc;
}

nlohmann::ordered_json to_json(const Truth& truth, const ScenarioSpec& spec) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json params;
  const auto names = gm::parameter_names(truth.spec);
  const auto values = gm::parameter_values(truth.spec, truth.params);
  for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = values[i];
  j["params"] = params;
  j["spec"] = {{"lags", truth.spec.lags},
               {"covariates", truth.spec.covariates},
               {"link", truth.spec.link == gm::TauLink::Log ? "log" : "identity"}};
  j["scenario"] = {{"seed", spec.seed},
                   {"months", spec.months},
                   {"days_per_month", spec.days_per_month},
                   {"start_month", spec.start_month},
                   {"bars_per_day", spec.intraday.bars_per_day},
                   {"overnight_share", spec.intraday.overnight_share},
                   {"covariate_ar", spec.covariate_ar},
                   {"attention_ar", spec.attention_ar},
                   {"attention_coef", spec.attention_coef},
                   {"macro_noise", spec.macro_noise},
                   {"attention_noise", spec.attention_noise}};
  j["macro_loadings"] = truth.macro_loadings;
  j["covariates"] = truth.covariates;
  j["dates"] = truth.dates;
  j["returns"] = truth.returns;
  j["tau"] = truth.tau;
  j["g"] = truth.g;
  j["h"] = truth.h;
  j["variance"] = truth.variance;
  j["multiplier"] = truth.multiplier;
  j["attention_factor"] = truth.attention_factor;
  return j;
}

void write_scenario(const Scenario& sc, const std::filesystem::path& dir) {
  md::save_intraday(sc.intraday, dir / "intraday.csv");
  md::save_daily(sc.daily, dir / "daily.csv");
  md::save_monthly(sc.monthly, dir / "monthly.csv");
  md::save_attention(sc.attention, dir / "attention.csv");
  csv::write_text(dir / "truth.json", to_json(sc.truth, sc.spec).dump(2) + "\n");
}

}  // namespace mfvol::simlab
