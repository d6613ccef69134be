#include "mfvol/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "mfvol/csv.hpp"
#include "mfvol/error.hpp"

namespace mfvol::features {

using marketdata::AlignedPanel;
using marketdata::Frame;

PcaModel fit_pca(const Eigen::MatrixXd& data, std::size_t retain) {
  const auto n = data.rows();
  const auto p = data.cols();
  if (n < 2 || p < 1 || retain < 1 || retain > static_cast<std::size_t>(p))
    fail(Errc::BadShape, "fit_pca needs n >= 2, p >= 1, 1 <= k <= p");
  if (!data.allFinite()) fail(Errc::BadShape, "fit_pca input has non-finite entries");

  PcaModel model;
  model.means = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - model.means.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(Errc::RankDeficient, "eigendecomposition failed");

  // Solver order is ascending; reverse to descending.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());

  model.eigenvalues.resize(p);
  Eigen::MatrixXd vectors(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    model.eigenvalues(j) = std::max(0.0, solver.eigenvalues()(order[static_cast<std::size_t>(j)]));
    vectors.col(j) = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  const double trace = cov.trace();
  if (!(trace > 0.0)) fail(Errc::RankDeficient, "covariance has zero trace");
  model.contributions = model.eigenvalues / trace;

  const auto k = static_cast<Eigen::Index>(retain);
  model.loadings = vectors.leftCols(k);
  model.variances = model.eigenvalues.head(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (model.variances(j) < 1e-12)
      fail(Errc::RankDeficient, "retained component " + std::to_string(j + 1) +
                                    " has eigenvalue " + std::to_string(model.variances(j)));
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < p; ++i)
      if (std::abs(model.loadings(i, j)) > std::abs(model.loadings(arg, j))) arg = i;
    if (model.loadings(arg, j) < 0.0) model.loadings.col(j) *= -1.0;
  }
  return model;
}

Eigen::MatrixXd transform(const PcaModel& model, const Eigen::MatrixXd& data) {
  if (static_cast<std::size_t>(data.cols()) != model.inputs())
    fail(Errc::BadShape, "transform: expected " + std::to_string(model.inputs()) + " columns");
  if (!data.allFinite()) fail(Errc::BadShape, "transform input has non-finite entries");
  return (data.rowwise() - model.means.transpose()) * model.loadings;
}

Eigen::MatrixXd inverse_transform(const PcaModel& model, const Eigen::MatrixXd& scores) {
  if (static_cast<std::size_t>(scores.cols()) != model.retained())
    fail(Errc::BadShape, "inverse_transform: expected " + std::to_string(model.retained()) +
                             " score columns");
  Eigen::MatrixXd out = scores * model.loadings.transpose();
  out.rowwise() += model.means.transpose();
  return out;
}

namespace {
std::vector<std::string> names_of(auto const& cols) {
  return {cols.begin(), cols.end()};
}
}  // namespace

GroupSpec macro_group(std::size_t retain) {
  return {"macro", names_of(marketdata::kMonthlyColumns), retain, "PCM", true};
}

GroupSpec tech_group(std::size_t retain) {
  // Technical indicators: every daily column except close.
  std::vector<std::string> cols;
  for (auto c : marketdata::kDailyColumns)
    if (c != "close") cols.emplace_back(c);
  return {"tech", cols, retain, "TECH", false};
}

GroupSpec attention_group(std::size_t retain) {
  return {"attention", names_of(marketdata::kAttentionColumns), retain, "BD", false};
}

std::vector<GroupSpec> default_groups() { return {macro_group(), tech_group(), attention_group()}; }

std::string score_name(const GroupSpec& spec, std::size_t j) {
  return spec.prefix + std::to_string(j + 1);
}

Eigen::MatrixXd to_matrix(const Frame& frame, const std::vector<std::string>& columns,
                          std::size_t begin, std::size_t end) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& v = frame.column(columns[c]);
    for (std::size_t r = begin; r < end; ++r)
      m(static_cast<Eigen::Index>(r - begin), static_cast<Eigen::Index>(c)) = v[r];
  }
  return m;
}

FactorPanel extract_factor_panel(const AlignedPanel& panel, const Frame& monthly,
                                 std::span<const GroupSpec> specs, std::size_t train_rows) {
  if (train_rows < 2 || train_rows > panel.rows())
    fail(Errc::EmptyPanel, "need at least two training rows");
  FactorPanel out{panel, Frame{monthly.labels, {}}, {}};

  for (const auto& spec : specs) {
    if (spec.retain > spec.columns.size())
      fail(Errc::BadParameter, spec.name + ": retained count exceeds member count");
    if (spec.monthly) {
      for (const auto& c : spec.columns)
        if (!monthly.has_column(c)) fail(Errc::MissingColumn, c);
      const std::size_t last = panel.month_index[train_rows - 1] + 1;
      if (last > monthly.rows()) fail(Errc::BadShape, "panel month index beyond monthly table");
      auto model = fit_pca(to_matrix(monthly, spec.columns, 0, last), spec.retain);
      model.group = spec.name;
      model.columns = spec.columns;
      const Eigen::MatrixXd scores =
          transform(model, to_matrix(monthly, spec.columns, 0, monthly.rows()));
      for (std::size_t j = 0; j < spec.retain; ++j) {
        std::vector<double> per_month(monthly.rows()), per_row(panel.rows());
        for (std::size_t m = 0; m < monthly.rows(); ++m)
          per_month[m] = scores(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j));
        for (std::size_t r = 0; r < panel.rows(); ++r) per_row[r] = per_month[panel.month_index[r]];
        out.monthly.add_column(score_name(spec, j), std::move(per_month));
        out.panel.add_column(score_name(spec, j), std::move(per_row));
      }
      out.models.push_back(std::move(model));
    } else {
      for (const auto& c : spec.columns)
        if (!panel.has_column(c)) fail(Errc::MissingColumn, c);
      auto model = fit_pca(to_matrix(panel, spec.columns, 0, train_rows), spec.retain);
      model.group = spec.name;
      model.columns = spec.columns;
      const Eigen::MatrixXd scores = transform(model, to_matrix(panel, spec.columns, 0, panel.rows()));
      for (std::size_t j = 0; j < spec.retain; ++j) {
        std::vector<double> v(panel.rows());
        for (std::size_t r = 0; r < panel.rows(); ++r)
          v[r] = scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        out.panel.add_column(score_name(spec, j), std::move(v));
      }
      out.models.push_back(std::move(model));
    }
  }
  return out;
}

namespace {
std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

void save_model(const PcaModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["group"] = model.group;
  j["columns"] = model.columns;
  j["means"] = to_vec(model.means);
  j["loadings_shape"] = {model.loadings.rows(), model.loadings.cols()};
  std::vector<double> rowmajor;
  for (Eigen::Index r = 0; r < model.loadings.rows(); ++r)
    for (Eigen::Index c = 0; c < model.loadings.cols(); ++c) rowmajor.push_back(model.loadings(r, c));
  j["loadings"] = rowmajor;
  j["variances"] = to_vec(model.variances);
  j["eigenvalues"] = to_vec(model.eigenvalues);
  j["contributions"] = to_vec(model.contributions);
  csv::write_text(path, j.dump(2) + "\n");
}

PcaModel load_model(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(csv::read_text(path));
  PcaModel m;
  m.group = j.at("group").get<std::string>();
  m.columns = j.at("columns").get<std::vector<std::string>>();
  m.means = from_vec(j.at("means").get<std::vector<double>>());
  const auto shape = j.at("loadings_shape").get<std::vector<Eigen::Index>>();
  const auto flat = j.at("loadings").get<std::vector<double>>();
  if (shape.size() != 2 || static_cast<std::size_t>(shape[0] * shape[1]) != flat.size())
    fail(Errc::BadShape, "loadings shape");
  m.loadings.resize(shape[0], shape[1]);
  for (Eigen::Index r = 0; r < shape[0]; ++r)
    for (Eigen::Index c = 0; c < shape[1]; ++c)
      m.loadings(r, c) = flat[static_cast<std::size_t>(r * shape[1] + c)];
  m.variances = from_vec(j.at("variances").get<std::vector<double>>());
  m.eigenvalues = from_vec(j.at("eigenvalues").get<std::vector<double>>());
  m.contributions = from_vec(j.at("contributions").get<std::vector<double>>());
  return m;
}

}  // namespace mfvol::features
