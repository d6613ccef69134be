#include "mfvol/garch_midas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "json.hpp"
#include "mfvol/csv.hpp"
#include "mfvol/error.hpp"
#include "mfvol/realized_vol.hpp"

namespace mfvol::garch_midas {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

std::size_t first_modeled_month(const MidasSpec& spec, const MidasData& data) {
  if (data.returns.empty()) fail(Errc::InsufficientLags, "no daily returns");
  const std::size_t first = data.month.front();
  if (spec.mode == LongRunMode::RvWindow) return first + spec.lags;
  return std::max(first, spec.lags);
}

void check_data(const MidasData& data) {
  if (data.returns.size() != data.month.size())
    fail(Errc::LengthMismatch, "returns and month indices differ in length");
  for (std::size_t d = 1; d < data.month.size(); ++d)
    if (data.month[d] < data.month[d - 1]) fail(Errc::BadShape, "month indices must be nondecreasing");
  for (double r : data.returns)
    if (!std::isfinite(r)) fail(Errc::NonFiniteInput, "non-finite return");
}

}  // namespace

// --- spec / params ----------------------------------------------------------

void MidasSpec::validate() const {
  if (lags < 1) fail(Errc::BadParameter, "K must be >= 1");
  if (mode == LongRunMode::Exogenous && covariates < 1)
    fail(Errc::BadParameter, "exogenous mode needs at least one covariate");
  if (mode == LongRunMode::Exogenous && link == TauLink::Identity)
    fail(Errc::BadParameter, "identity tau link is only permitted in rv-window mode");
}

MidasSpec make_spec(LongRunMode mode, std::size_t lags, std::size_t covariates) {
  MidasSpec spec;
  spec.lags = lags;
  spec.mode = mode;
  spec.covariates = mode == LongRunMode::RvWindow ? 1 : covariates;
  spec.link = mode == LongRunMode::RvWindow ? TauLink::Identity : TauLink::Log;
  return spec;
}

void MidasParams::validate(const MidasSpec& spec) const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta < 1.0))
    fail(Errc::BadParameter, "need alpha >= 0, beta >= 0, alpha + beta < 1");
  if (theta.size() != spec.terms() || omega2.size() != spec.terms())
    fail(Errc::BadParameter, "expected " + std::to_string(spec.terms()) + " theta/omega2 values");
  for (double w : omega2)
    if (!(w >= 1.0)) fail(Errc::BadParameter, "omega2 must be >= 1");
  if (!(omega1 >= 1.0)) fail(Errc::BadParameter, "omega1 must be >= 1");
  if (!std::isfinite(mu) || !std::isfinite(m)) fail(Errc::BadParameter, "non-finite mu or m");
  for (double t : theta)
    if (!std::isfinite(t)) fail(Errc::BadParameter, "non-finite theta");
}

// --- filters ----------------------------------------------------------------

std::vector<double> beta_weights(std::size_t lags, double omega1, double omega2) {
  if (lags < 1) fail(Errc::BadParameter, "K must be >= 1");
  if (!(omega1 >= 1.0) || !(omega2 >= 1.0) || !std::isfinite(omega1) || !std::isfinite(omega2))
    fail(Errc::BadParameter, "beta weights need omega1 >= 1 and omega2 >= 1");
  if (lags == 1) return {1.0};
  const double K = static_cast<double>(lags);
  std::vector<double> w(lags);
  double sum = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    const double x = static_cast<double>(k) / K;
    w[k - 1] = std::pow(x, omega1 - 1.0) * std::pow(1.0 - x, omega2 - 1.0);
    sum += w[k - 1];
  }
  for (auto& v : w) v /= sum;
  return w;
}

LongRun long_run_tau(const MidasSpec& spec, const MidasParams& params,
                     const std::vector<std::vector<double>>& covariates, std::size_t first_month,
                     std::size_t last_month) {
  const std::size_t J = spec.terms();
  if (covariates.size() != J) fail(Errc::BadShape, "expected " + std::to_string(J) + " covariate series");
  if (params.theta.size() != J || params.omega2.size() != J)
    fail(Errc::BadParameter, "theta/omega2 count does not match the spec");
  if (first_month < spec.lags)
    fail(Errc::InsufficientLags, "month " + std::to_string(first_month) + " has fewer than K = " +
                                     std::to_string(spec.lags) + " prior months");
  for (const auto& x : covariates)
    if (x.size() <= last_month) fail(Errc::InsufficientLags, "covariate series too short");

  std::vector<std::vector<double>> weights;
  for (std::size_t j = 0; j < J; ++j)
    weights.push_back(beta_weights(spec.lags, params.omega1, params.omega2[j]));

  LongRun out{first_month, {}};
  for (std::size_t t = first_month; t <= last_month; ++t) {
    double x = params.m;
    for (std::size_t j = 0; j < J; ++j) {
      double acc = 0.0;
      for (std::size_t k = 1; k <= spec.lags; ++k) {
        const double lag = covariates[j][t - k];
        if (std::isnan(lag))
          fail(Errc::InsufficientLags, "missing covariate lag for month " + std::to_string(t));
        acc += weights[j][k - 1] * lag;
      }
      x += params.theta[j] * acc;
    }
    double tau = spec.link == TauLink::Log ? std::exp(x) : x;
    if (!(tau > 0.0) || !std::isfinite(tau))
      fail(Errc::NonPositiveTau, "tau = " + std::to_string(tau) + " in month " + std::to_string(t));
    out.tau.push_back(tau);
  }
  return out;
}

std::vector<double> short_run_g(const MidasParams& params, std::span<const double> returns,
                                std::span<const double> tau_per_day) {
  if (returns.size() != tau_per_day.size()) fail(Errc::LengthMismatch, "returns vs tau");
  const double omega = params.omega();
  std::vector<double> g(returns.size());
  for (std::size_t d = 0; d < returns.size(); ++d) {
    if (!(tau_per_day[d] > 0.0)) fail(Errc::NonPositiveTau, "tau must be positive");
    if (d == 0) {
      g[d] = 1.0;
    } else {
      const double e = returns[d - 1] - params.mu;
      g[d] = omega + params.alpha * e * e / tau_per_day[d] + params.beta * g[d - 1];
    }
  }
  return g;
}

std::vector<std::vector<double>> long_run_inputs(const MidasSpec& spec, const MidasData& data) {
  if (spec.mode == LongRunMode::Exogenous) return data.covariates;
  if (data.returns.empty()) return {std::vector<double>{}};
  const auto per_month = realized_vol::monthly_rv(data.returns, data.month);
  std::vector<double> series(data.month.front(), kNaN);
  series.insert(series.end(), per_month.begin(), per_month.end());
  return {series};
}

Filtered filter(const MidasSpec& spec, const MidasParams& params, const MidasData& data) {
  spec.validate();
  params.validate(spec);
  check_data(data);
  const std::size_t first_month = first_modeled_month(spec, data);
  const std::size_t last_month = data.month.back();
  if (first_month > last_month)
    fail(Errc::InsufficientLags, "no month has K = " + std::to_string(spec.lags) + " lags available");

  const auto tau_months =
      long_run_tau(spec, params, long_run_inputs(spec, data), first_month, last_month);

  Filtered out;
  out.first_day = static_cast<std::size_t>(
      std::lower_bound(data.month.begin(), data.month.end(), first_month) - data.month.begin());
  const std::size_t n = data.days() - out.first_day;
  out.tau.resize(n);
  for (std::size_t d = 0; d < n; ++d) out.tau[d] = tau_months.at(data.month[out.first_day + d]);
  out.g = short_run_g(params, std::span(data.returns).subspan(out.first_day), out.tau);
  out.h.resize(n);
  for (std::size_t d = 0; d < n; ++d) out.h[d] = out.tau[d] * out.g[d];
  return out;
}

double log_likelihood(const MidasSpec& spec, const MidasParams& params, const MidasData& data) {
  const auto f = filter(spec, params, data);
  constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
  double ll = 0.0;
  for (std::size_t d = 0; d < f.h.size(); ++d) {
    const double e = data.returns[f.first_day + d] - params.mu;
    ll += -0.5 * (kLog2Pi + std::log(f.h[d]) + e * e / f.h[d]);
  }
  if (!std::isfinite(ll)) fail(Errc::NonFiniteLikelihood, "log-likelihood is not finite");
  return ll;
}

// --- estimation -------------------------------------------------------------

namespace {

struct Codec {
  const MidasSpec& spec;
  bool theta_zero;

  std::size_t size() const {
    return 4 + (theta_zero ? 0 : 2 * spec.terms()) + (spec.free_omega1 ? 1 : 0);
  }

  std::vector<double> encode(const MidasParams& p) const {
    const double persistence = std::clamp(p.alpha + p.beta, 1e-6, 1.0 - 1e-6);
    const double share = std::clamp(p.alpha / std::max(p.alpha + p.beta, 1e-12), 1e-6, 1.0 - 1e-6);
    std::vector<double> z{p.mu, logit(persistence), logit(share), p.m};
    if (!theta_zero)
      for (std::size_t j = 0; j < spec.terms(); ++j) {
        z.push_back(p.theta[j]);
        z.push_back(std::log(std::max(p.omega2[j] - 1.0, 1e-8)));
      }
    if (spec.free_omega1) z.push_back(std::log(std::max(p.omega1 - 1.0, 1e-8)));
    return z;
  }

  MidasParams decode(std::span<const double> z) const {
    MidasParams p;
    p.mu = z[0];
    const double persistence = logistic(z[1]);
    const double share = logistic(z[2]);
    p.alpha = persistence * share;
    p.beta = persistence * (1.0 - share);
    p.m = z[3];
    std::size_t i = 4;
    for (std::size_t j = 0; j < spec.terms(); ++j) {
      if (theta_zero) {
        p.theta.push_back(0.0);
        p.omega2.push_back(1.0);
      } else {
        p.theta.push_back(z[i++]);
        p.omega2.push_back(1.0 + std::exp(z[i++]));
      }
    }
    p.omega1 = spec.free_omega1 ? 1.0 + std::exp(z[i]) : 1.0;
    return p;
  }
};

MidasParams default_init(const MidasSpec& spec, const MidasData& data, std::size_t first_day) {
  double mean = 0.0, var = 0.0;
  const std::size_t n = data.days() - first_day;
  for (std::size_t d = first_day; d < data.days(); ++d) mean += data.returns[d];
  mean /= static_cast<double>(n);
  for (std::size_t d = first_day; d < data.days(); ++d)
    var += (data.returns[d] - mean) * (data.returns[d] - mean);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) fail(Errc::DegenerateData, "modeled returns have zero variance");

  MidasParams p;
  p.mu = mean;
  p.alpha = 0.05;
  p.beta = 0.90;
  p.m = spec.link == TauLink::Log ? std::log(var) : var;
  p.theta.assign(spec.terms(), 0.0);
  p.omega2.assign(spec.terms(), 5.0);
  p.omega1 = spec.free_omega1 ? 2.0 : 1.0;
  return p;
}

}  // namespace

MidasFit fit(const MidasSpec& spec, const MidasData& data, const FitOptions& options) {
  spec.validate();
  check_data(data);
  const std::size_t first_month = first_modeled_month(spec, data);
  if (first_month > data.month.back())
    fail(Errc::InsufficientLags, "K = " + std::to_string(spec.lags) +
                                     " exceeds the months available before the sample end");
  const auto first_day = static_cast<std::size_t>(
      std::lower_bound(data.month.begin(), data.month.end(), first_month) - data.month.begin());
  if (data.month.back() - data.month[first_day] < 1)
    fail(Errc::InsufficientLags, "need at least two modeled months after the K-month warm-up");

  const Codec codec{spec, options.theta_fixed_zero};
  MidasParams init = options.init.value_or(default_init(spec, data, first_day));
  if (options.theta_fixed_zero) {
    init.theta.assign(spec.terms(), 0.0);
    init.omega2.assign(spec.terms(), 1.0);
  }
  init.validate(spec);

  std::size_t evaluations = 0;
  const optim::Objective cost = [&](std::span<const double> z) {
    ++evaluations;
    try {
      return -log_likelihood(spec, codec.decode(z), data);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  ConvergenceReport report;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> jitter(0.0, 0.5);
  const auto z0 = codec.encode(init);

  optim::NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  const std::size_t starts = std::max<std::size_t>(options.restarts, 1);
  for (std::size_t r = 0; r < starts; ++r) {
    auto z = z0;
    if (r > 0)
      for (auto& v : z) v += jitter(rng);
    auto res = optim::nelder_mead(cost, z, options.simplex);
    report.iterations += res.iterations;
    report.restarts.push_back({-res.value, res.iterations, res.spread, res.converged});
    if (res.value < best.value) {  // strict: ties keep the lower restart index
      best = res;
      report.best_restart = r;
    }
  }
  if (!std::isfinite(best.value))
    fail(Errc::NoConvergence, "no restart reached a finite likelihood");

  // Restart the simplex around the incumbent to escape premature collapse.
  for (std::size_t round = 0; round < options.polish_rounds; ++round) {
    auto opts = options.simplex;
    opts.initial_step = 0.05;
    auto res = optim::nelder_mead(cost, best.x, opts);
    report.iterations += res.iterations;
    const double gain = best.value - res.value;
    if (res.value <= best.value) best = res;
    if (gain < options.simplex.spread_tol) break;
  }

  report.evaluations = evaluations;
  report.spread = best.spread;
  report.converged = best.converged;
  if (!best.converged) {
    std::string diag = "simplex did not converge within " +
                       std::to_string(options.simplex.max_iterations) + " iterations; restarts:";
    for (std::size_t r = 0; r < report.restarts.size(); ++r)
      diag += " [" + std::to_string(r) + ": loglik " + std::to_string(report.restarts[r].loglik) +
              ", spread " + std::to_string(report.restarts[r].spread) + "]";
    fail(Errc::NoConvergence, diag);
  }

  MidasFit out;
  out.spec = spec;
  out.params = codec.decode(best.x);
  out.params.validate(spec);
  out.series = filter(spec, out.params, data);
  out.loglik = log_likelihood(spec, out.params, data);
  out.convergence = std::move(report);
  return out;
}

// --- simulation -------------------------------------------------------------

Simulation simulate(const MidasSpec& spec, const MidasParams& params, std::size_t months,
                    std::size_t days_per_month, std::uint64_t seed,
                    const SimulationOptions& options) {
  spec.validate();
  params.validate(spec);
  if (months <= spec.lags) fail(Errc::BadParameter, "months must exceed K");
  if (days_per_month < 1) fail(Errc::BadParameter, "days_per_month must be >= 1");
  if (!(std::abs(options.ar_coef) < 1.0)) fail(Errc::BadParameter, "AR coefficient must be in (-1, 1)");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Simulation sim;
  const std::size_t K = spec.lags;
  const bool rv_mode = spec.mode == LongRunMode::RvWindow;
  const std::size_t n_modeled = (months - K) * days_per_month;
  if (!options.variance_multiplier.empty() && options.variance_multiplier.size() != n_modeled)
    fail(Errc::BadParameter, "variance multiplier length must equal the modeled day count");

  if (!rv_mode) {
    const double innov = std::sqrt(1.0 - options.ar_coef * options.ar_coef);
    for (std::size_t j = 0; j < spec.covariates; ++j) {
      std::vector<double> x(months);
      x[0] = normal(rng);
      for (std::size_t t = 1; t < months; ++t) x[t] = options.ar_coef * x[t - 1] + innov * normal(rng);
      sim.data.covariates.push_back(std::move(x));
    }
  }

  // rv-window warm-up: i.i.d. draws at the slope-free level.
  if (rv_mode) {
    const double level = spec.link == TauLink::Log ? std::exp(params.m) : params.m;
    if (!(level > 0.0)) fail(Errc::BadParameter, "warm-up variance must be positive");
    for (std::size_t t = 0; t < K; ++t)
      for (std::size_t i = 0; i < days_per_month; ++i) {
        sim.data.returns.push_back(params.mu + std::sqrt(level) * normal(rng));
        sim.data.month.push_back(t);
      }
  }

  sim.tau_month.assign(months, std::numeric_limits<double>::quiet_NaN());
  const double omega = params.omega();
  std::size_t d = 0;
  double g_prev = 1.0, r_prev = 0.0;
  for (std::size_t t = K; t < months; ++t) {
    std::vector<std::vector<double>> inputs;
    if (rv_mode) {
      std::vector<double> series(t, 0.0);
      for (std::size_t k = 0; k < sim.data.returns.size(); ++k)
        series[sim.data.month[k]] += sim.data.returns[k] * sim.data.returns[k];
      inputs.push_back(std::move(series));
    } else {
      inputs = sim.data.covariates;
    }
    // Lags of month t only read positions < t.
    for (auto& s : inputs) s.resize(std::max<std::size_t>(s.size(), t + 1), 0.0);
    const double tau = long_run_tau(spec, params, inputs, t, t).tau.front();
    sim.tau_month[t] = tau;
    for (std::size_t i = 0; i < days_per_month; ++i, ++d) {
      double g = 1.0;
      if (d > 0) {
        const double e = r_prev - params.mu;
        g = omega + params.alpha * e * e / tau + params.beta * g_prev;
      }
      const double h = tau * g;
      const double var = options.variance_multiplier.empty() ? h : h * options.variance_multiplier[d];
      const double r = params.mu + std::sqrt(var) * normal(rng);
      sim.tau.push_back(tau);
      sim.g.push_back(g);
      sim.h.push_back(h);
      sim.variance.push_back(var);
      sim.data.returns.push_back(r);
      sim.data.month.push_back(t);
      g_prev = g;
      r_prev = r;
    }
  }
  return sim;
}

// --- persistence ------------------------------------------------------------

std::vector<std::string> parameter_names(const MidasSpec& spec) {
  std::vector<std::string> names{"mu", "alpha", "beta", "m"};
  for (std::size_t j = 1; j <= spec.terms(); ++j) {
    names.push_back("theta_" + std::to_string(j));
    names.push_back("w2_" + std::to_string(j));
  }
  if (spec.free_omega1) names.push_back("w1");
  return names;
}

std::vector<double> parameter_values(const MidasSpec& spec, const MidasParams& params) {
  std::vector<double> v{params.mu, params.alpha, params.beta, params.m};
  for (std::size_t j = 0; j < spec.terms(); ++j) {
    v.push_back(params.theta.at(j));
    v.push_back(params.omega2.at(j));
  }
  if (spec.free_omega1) v.push_back(params.omega1);
  return v;
}

void save_fit(const MidasFit& fit, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["spec"] = {{"K", fit.spec.lags},
               {"mode", fit.spec.mode == LongRunMode::RvWindow ? "rv-window" : "exogenous"},
               {"J", fit.spec.terms()},
               {"link", fit.spec.link == TauLink::Log ? "log" : "identity"},
               {"free_w1", fit.spec.free_omega1}};
  nlohmann::ordered_json params;
  const auto names = parameter_names(fit.spec);
  const auto values = parameter_values(fit.spec, fit.params);
  for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = values[i];
  j["params"] = params;
  j["omega"] = fit.params.omega();
  j["loglik"] = fit.loglik;
  nlohmann::ordered_json conv;
  conv["converged"] = fit.convergence.converged;
  conv["iterations"] = fit.convergence.iterations;
  conv["evaluations"] = fit.convergence.evaluations;
  conv["spread"] = fit.convergence.spread;
  conv["best_restart"] = fit.convergence.best_restart;
  auto restarts = nlohmann::ordered_json::array();
  for (const auto& r : fit.convergence.restarts)
    restarts.push_back({{"loglik", r.loglik}, {"iterations", r.iterations},
                        {"spread", r.spread}, {"converged", r.converged}});
  conv["restarts"] = restarts;
  j["convergence"] = conv;
  csv::write_text(path, j.dump(2) + "\n");
}

MidasFit load_fit(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(csv::read_text(path));
  MidasFit out;
  const auto& s = j.at("spec");
  out.spec.lags = s.at("K").get<std::size_t>();
  out.spec.mode = s.at("mode").get<std::string>() == "rv-window" ? LongRunMode::RvWindow
                                                                  : LongRunMode::Exogenous;
  out.spec.covariates = s.at("J").get<std::size_t>();
  out.spec.link = s.at("link").get<std::string>() == "log" ? TauLink::Log : TauLink::Identity;
  out.spec.free_omega1 = s.value("free_w1", false);
  const auto& p = j.at("params");
  out.params.mu = p.at("mu").get<double>();
  out.params.alpha = p.at("alpha").get<double>();
  out.params.beta = p.at("beta").get<double>();
  out.params.m = p.at("m").get<double>();
  for (std::size_t k = 1; k <= out.spec.terms(); ++k) {
    out.params.theta.push_back(p.at("theta_" + std::to_string(k)).get<double>());
    out.params.omega2.push_back(p.at("w2_" + std::to_string(k)).get<double>());
  }
  out.params.omega1 = out.spec.free_omega1 ? p.at("w1").get<double>() : 1.0;
  out.loglik = j.value("loglik", 0.0);
  if (j.contains("convergence")) {
    const auto& c = j.at("convergence");
    out.convergence.converged = c.value("converged", false);
    out.convergence.iterations = c.value("iterations", std::size_t{0});
    out.convergence.spread = c.value("spread", 0.0);
  }
  out.spec.validate();
  out.params.validate(out.spec);
  return out;
}

void save_series(const Filtered& series, std::span<const std::string> dates,
                 const std::filesystem::path& path) {
  if (dates.size() != series.first_day + series.h.size())
    fail(Errc::LengthMismatch, "dates do not cover the filtered series");
  csv::Writer w({"date", "tau", "g", "h"});
  for (std::size_t d = 0; d < series.h.size(); ++d)
    w.row({dates[series.first_day + d], csv::format(series.tau[d]), csv::format(series.g[d]),
           csv::format(series.h[d])});
  w.save(path);
}

}  // namespace mfvol::garch_midas
