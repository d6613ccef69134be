#pragma once

#include <cstdint>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfvol/nelder_mead.hpp"

namespace mfvol::garch_midas {

// GARCH-MIDAS: daily variance h = tau_t * g_{i,t}, where tau_t is a slow
// monthly component filtered from K lags of low-frequency data through beta
// lag weights, and g is a unit-mean GARCH(1,1) on tau-standardized returns.

enum class LongRunMode { RvWindow, Exogenous };
enum class TauLink { Identity, Log };

struct MidasSpec {
  std::size_t lags = 12;  // K, in months
  LongRunMode mode = LongRunMode::Exogenous;
  std::size_t covariates = 1;  // J, exogenous mode only
  TauLink link = TauLink::Log;
  bool free_omega1 = false;

  /// Number of slope/decay pairs: J in exogenous mode, 1 in rv-window mode.
  std::size_t terms() const { return mode == LongRunMode::RvWindow ? 1 : covariates; }
  void validate() const;
};

/// Exogenous specs default to the log link, rv-window specs to identity.
MidasSpec make_spec(LongRunMode mode, std::size_t lags, std::size_t covariates = 1);

struct MidasParams {
  double mu = 0.0;
  double alpha = 0.05;
  double beta = 0.90;
  double m = 0.0;
  std::vector<double> theta;   // one slope per term
  std::vector<double> omega2;  // one decay per term, >= 1
  double omega1 = 1.0;

  /// Short-run intercept fixed by the E[g] = 1 normalization.
  double omega() const { return 1.0 - alpha - beta; }
  void validate(const MidasSpec& spec) const;
};

/// Daily returns tagged with the monthly-table position of their month, and
/// (exogenous mode) one covariate series per term indexed by that position.
struct MidasData {
  std::vector<double> returns;
  std::vector<std::size_t> month;  // nondecreasing
  std::vector<std::vector<double>> covariates;

  std::size_t days() const { return returns.size(); }
};

/// Normalized beta-kernel lag weights phi_1..phi_K.
std::vector<double> beta_weights(std::size_t lags, double omega1, double omega2);

/// tau for months [first_month, last_month]; lag k of month t reads
/// `covariates[j][t - k]`. Throws InsufficientLags when a lag is missing.
struct LongRun {
  std::size_t first_month = 0;
  std::vector<double> tau;

  double at(std::size_t month) const { return tau.at(month - first_month); }
};
LongRun long_run_tau(const MidasSpec& spec, const MidasParams& params,
                     const std::vector<std::vector<double>>& covariates, std::size_t first_month,
                     std::size_t last_month);

/// Unit-mean GARCH(1,1) filter: g_0 = 1 and
/// g_d = omega + alpha (r_{d-1} - mu)^2 / tau_d + beta g_{d-1}.
std::vector<double> short_run_g(const MidasParams& params, std::span<const double> returns,
                                std::span<const double> tau_per_day);

/// Filtered series over the modeled days, i.e. data days [first_day, n).
struct Filtered {
  std::size_t first_day = 0;
  std::vector<double> tau;  // per modeled day (step function over months)
  std::vector<double> g;
  std::vector<double> h;
};

/// Covariate series the long-run filter reads: `data.covariates` in exogenous
/// mode, monthly realized variance of the returns in rv-window mode.
std::vector<std::vector<double>> long_run_inputs(const MidasSpec& spec, const MidasData& data);

Filtered filter(const MidasSpec& spec, const MidasParams& params, const MidasData& data);

/// Gaussian log-likelihood summed over the modeled days.
double log_likelihood(const MidasSpec& spec, const MidasParams& params, const MidasData& data);

struct FitOptions {
  std::size_t restarts = 5;
  std::uint64_t seed = 20240101;
  optim::NelderMeadOptions simplex{1e-8, 5000, 0.25};
  std::size_t polish_rounds = 3;
  bool theta_fixed_zero = false;
  std::optional<MidasParams> init;
};

struct RestartReport {
  double loglik = 0.0;
  std::size_t iterations = 0;
  double spread = 0.0;
  bool converged = false;
};

struct ConvergenceReport {
  std::size_t iterations = 0;  // total simplex iterations over all runs
  std::size_t evaluations = 0;
  double spread = 0.0;  // terminal spread of the final run
  bool converged = false;
  std::size_t best_restart = 0;
  std::vector<RestartReport> restarts;
};

struct MidasFit {
  MidasSpec spec;
  MidasParams params;
  double loglik = 0.0;
  Filtered series;
  ConvergenceReport convergence;
};

/// Maximum-likelihood estimation by seeded multi-start Nelder-Mead over an
/// unconstrained reparameterization (logistic persistence and share for
/// alpha/beta, 1 + exp(.) for beta-weight decays).
MidasFit fit(const MidasSpec& spec, const MidasData& data, const FitOptions& options = {});

struct SimulationOptions {
  double ar_coef = 0.8;  // AR(1) coefficient of each unit-variance covariate
  /// Optional per-day factor on the return variance (length = simulated
  /// days); the g recursion itself is unchanged.
  std::vector<double> variance_multiplier;
};

struct Simulation {
  MidasData data;
  std::vector<double> tau;  // per simulated day
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> variance;  // h times the variance multiplier
  std::vector<double> tau_month;  // per monthly position, NaN before the first modeled month
};

/// Draws covariates for `months` monthly positions and returns for
/// `days_per_month` days in each month from K on (rv-window mode also draws
/// i.i.d. warm-up returns for the first K months). Deterministic per seed.
Simulation simulate(const MidasSpec& spec, const MidasParams& params, std::size_t months,
                    std::size_t days_per_month, std::uint64_t seed,
                    const SimulationOptions& options = {});

/// Parameter names in output order: mu, alpha, beta, m, theta_1, w2_1, ... [, w1].
std::vector<std::string> parameter_names(const MidasSpec& spec);
std::vector<double> parameter_values(const MidasSpec& spec, const MidasParams& params);

void save_fit(const MidasFit& fit, const std::filesystem::path& path);
MidasFit load_fit(const std::filesystem::path& path);

/// `date,tau,g,h` over the modeled days; `dates` covers all data days.
void save_series(const Filtered& series, std::span<const std::string> dates,
                 const std::filesystem::path& path);

}  // namespace mfvol::garch_midas
