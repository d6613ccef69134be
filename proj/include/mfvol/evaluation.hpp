#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfvol/marketdata.hpp"

namespace mfvol::evaluation {

// Forecast-accuracy measures for a variance forecast h against realized rv.

double mse(std::span<const double> h, std::span<const double> rv);
double hmse(std::span<const double> h, std::span<const double> rv);
double mae(std::span<const double> h, std::span<const double> rv);
double mape(std::span<const double> h, std::span<const double> rv);
/// mean(ln h + rv / h)
double qlike(std::span<const double> h, std::span<const double> rv);
/// R^2 of the least-squares regression of ln rv on ln h (higher is better).
double r2log(std::span<const double> h, std::span<const double> rv);
/// mean((ln(rv / h))^2), the lower-is-better reading of R2LOG.
double r2log_loss(std::span<const double> h, std::span<const double> rv);

enum class Group { G1, G2, G3, G4 };

inline constexpr Group kAllGroups[] = {Group::G1, Group::G2, Group::G3, Group::G4};

std::string_view group_name(Group g);
Group parse_group(std::string_view name);

/// Feature columns of a group, in the order the model sees them.
std::vector<std::string> group_columns(Group g);

/// Subset of `frame` holding the group's columns; throws MissingColumn.
marketdata::Frame ablation_features(Group g, const marketdata::Frame& frame);

struct Baseline {
  std::vector<double> pred;
  std::vector<double> truth;
};

/// h_t = rv_{t-1}; the first point is dropped.
Baseline persistence_baseline(std::span<const double> rv);

struct ReportRow {
  std::string model;
  std::string group;
  std::size_t n = 0;
  std::size_t excluded = 0;  // pairs dropped because rv <= 0
  double mse = 0.0, hmse = 0.0, mae = 0.0, mape = 0.0, qlike = 0.0, r2log = 0.0;
};

/// All six measures on the pairs with rv > 0.
ReportRow evaluate(std::string model, std::string group, std::span<const double> pred,
                   std::span<const double> truth);

/// Text describing each formula, printed alongside a report.
std::string formula_notes();

void save_report(std::span<const ReportRow> rows, const std::filesystem::path& path);

}  // namespace mfvol::evaluation
