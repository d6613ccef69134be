#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mfvol/marketdata.hpp"

namespace mfvol::features {

/// Principal components of one indicator group.
struct PcaModel {
  std::string group;
  std::vector<std::string> columns;  // member indicators, row order of `loadings`
  Eigen::VectorXd means;             // p
  Eigen::MatrixXd loadings;          // p x k, orthonormal columns
  Eigen::VectorXd variances;         // k retained eigenvalues, nonincreasing
  Eigen::VectorXd eigenvalues;       // all p eigenvalues, nonincreasing
  Eigen::VectorXd contributions;     // eigenvalue / trace for all p components

  std::size_t inputs() const { return static_cast<std::size_t>(loadings.rows()); }
  std::size_t retained() const { return static_cast<std::size_t>(loadings.cols()); }
};

/// Eigendecomposition of the sample covariance (divisor n - 1) of `data`
/// (n x p), keeping the top `retain` components. Each loading column is
/// signed so that its largest-magnitude entry is positive.
PcaModel fit_pca(const Eigen::MatrixXd& data, std::size_t retain);

Eigen::MatrixXd transform(const PcaModel& model, const Eigen::MatrixXd& data);
Eigen::MatrixXd inverse_transform(const PcaModel& model, const Eigen::MatrixXd& scores);

struct GroupSpec {
  std::string name;                  // macro | tech | attention
  std::vector<std::string> columns;  // member columns
  std::size_t retain = 1;
  std::string prefix;  // score column prefix: PCM, TECH, BD
  bool monthly = false;
};

GroupSpec macro_group(std::size_t retain = 2);
GroupSpec tech_group(std::size_t retain = 3);
GroupSpec attention_group(std::size_t retain = 1);
std::vector<GroupSpec> default_groups();

/// Name of the j-th (0-based) score column of a group, e.g. TECH2.
std::string score_name(const GroupSpec& spec, std::size_t j);

struct FactorPanel {
  marketdata::AlignedPanel panel;  // input panel plus score columns
  marketdata::Frame monthly;       // monthly-group scores for every monthly record
  std::vector<PcaModel> models;
};

/// Fits each group's PCA on training data only: the first `train_rows` panel
/// rows for daily groups, and for monthly groups the monthly records up to
/// the month of the last training row. Scores are appended to the panel (and,
/// for monthly groups, to `monthly`).
FactorPanel extract_factor_panel(const marketdata::AlignedPanel& panel,
                                 const marketdata::Frame& monthly,
                                 std::span<const GroupSpec> specs, std::size_t train_rows);

Eigen::MatrixXd to_matrix(const marketdata::Frame& frame, const std::vector<std::string>& columns,
                          std::size_t begin, std::size_t end);

void save_model(const PcaModel& model, const std::filesystem::path& path);
PcaModel load_model(const std::filesystem::path& path);

}  // namespace mfvol::features
