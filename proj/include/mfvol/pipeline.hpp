#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfvol/evaluation.hpp"
#include "mfvol/features.hpp"
#include "mfvol/garch_midas.hpp"
#include "mfvol/realized_vol.hpp"
#include "mfvol/simlab.hpp"
#include "mfvol/transformer.hpp"

namespace mfvol::pipeline {

/// Every setting of a run. Settable by name from a flat `key = value` file
/// or from the command line; see `keys()`.
struct RunConfig {
  std::filesystem::path out_dir = "out";
  std::filesystem::path intraday, daily, monthly, attention;  // empty: <out_dir>/<name>.csv

  std::uint64_t seed = 1;
  std::size_t lags = 12;
  double split_ratio = 0.9;
  marketdata::FillPolicy fill = marketdata::FillPolicy::ForwardFill;

  std::size_t restarts = 5;

  transformer::ModelConfig model;
  transformer::TrainConfig train{.validation_fraction = 0.1, .clip_norm = 1.0};
  evaluation::Group group = evaluation::Group::G4;

  // simulate
  std::size_t months = 144;
  std::size_t days_per_month = 21;
  double attention_coef = 0.3;
  double overnight_share = 0.2;

  std::filesystem::path input(std::string_view name) const;
  std::filesystem::path output(std::string_view name) const { return out_dir / std::string(name); }

  /// Applies one setting; throws BadParameter for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  /// Reads `key = value` lines; blank lines and `#` comments are skipped.
  void load_file(const std::filesystem::path& path);

  static std::vector<std::string> keys();
  void validate() const;
};

simlab::ScenarioSpec scenario_spec(const RunConfig& cfg);

/// Where the chronological split falls, shared by every stage after `pca`.
struct Split {
  std::size_t rows = 0;
  std::size_t train_rows = 0;
  std::string first_test_date;  // empty when the test span is empty
};

simlab::Scenario run_simulate(const RunConfig& cfg);
realized_vol::RvSeries run_rv(const RunConfig& cfg);
features::FactorPanel run_pca(const RunConfig& cfg);
garch_midas::MidasFit run_midas_fit(const RunConfig& cfg);

/// Day-aligned model inputs: factor scores, h and the rv_adj target.
struct ModelTable {
  std::vector<std::string> dates;
  marketdata::Frame features;  // TECH1..3, BD1, h
  std::vector<double> target;
  std::size_t train_rows = 0;  // rows dated before the first test date
};

ModelTable load_model_table(const RunConfig& cfg);

struct TrainedModel {
  evaluation::Group group = evaluation::Group::G4;
  std::vector<std::string> columns;
  std::vector<double> feature_means, feature_stds;
  double target_mean = 0.0, target_std = 1.0;
  double floor = 0.0;  // smallest positive training target; predictions are clamped to it
  std::size_t window = 5;
  transformer::TrainResult result;
};

TrainedModel fit_model(const ModelTable& table, const RunConfig& cfg, evaluation::Group group);

struct Predictions {
  std::vector<std::string> dates;
  std::vector<double> truth;
  std::vector<double> pred;
};

Predictions predict_test(const TrainedModel& model, const ModelTable& table);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
void save_predictions(const Predictions& p, const std::filesystem::path& path);
Predictions load_predictions(const std::filesystem::path& path);

TrainedModel run_train(const RunConfig& cfg);
Predictions run_predict(const RunConfig& cfg);
std::vector<evaluation::ReportRow> run_evaluate(const RunConfig& cfg);
std::vector<evaluation::ReportRow> run_ablate(const RunConfig& cfg);

}  // namespace mfvol::pipeline
