#include "mfvol/evaluation.hpp"

#include <cmath>

#include "mfvol/csv.hpp"
#include "mfvol/error.hpp"

namespace mfvol::evaluation {

namespace {

void check_lengths(std::span<const double> h, std::span<const double> rv) {
  if (h.size() != rv.size())
    fail(Errc::LengthMismatch,
         "forecast has " + std::to_string(h.size()) + " points, truth " + std::to_string(rv.size()));
  if (h.empty()) fail(Errc::LengthMismatch, "empty forecast");
}

void check_positive_truth(std::span<const double> rv) {
  for (double v : rv)
    if (!(v > 0.0)) fail(Errc::NonPositiveTruth, "realized variance must be positive");
}

void check_positive(std::span<const double> h, std::span<const double> rv) {
  for (std::size_t i = 0; i < h.size(); ++i)
    if (!(h[i] > 0.0) || !(rv[i] > 0.0))
      fail(Errc::NonPositiveInput, "forecast and truth must be positive at index " + std::to_string(i));
}

template <class F>
double mean_of(std::size_t n, F term) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += term(i);
  return s / static_cast<double>(n);
}

}  // namespace

double mse(std::span<const double> h, std::span<const double> rv) {
  check_lengths(h, rv);
  return mean_of(h.size(), [&](std::size_t i) { return (rv[i] - h[i]) * (rv[i] - h[i]); });
}

double hmse(std::span<const double> h, std::span<const double> rv) {
  check_lengths(h, rv);
  check_positive_truth(rv);
  return mean_of(h.size(), [&](std::size_t i) {
    const double e = 1.0 - h[i] / rv[i];
    return e * e;
  });
}

double mae(std::span<const double> h, std::span<const double> rv) {
  check_lengths(h, rv);
  return mean_of(h.size(), [&](std::size_t i) { return std::abs(rv[i] - h[i]); });
}

double mape(std::span<const double> h, std::span<const double> rv) {
  check_lengths(h, rv);
  check_positive_truth(rv);
  return mean_of(h.size(), [&](std::size_t i) { return std::abs(1.0 - h[i] / rv[i]); });
}

double qlike(std::span<const double> h, std::span<const double> rv) {
  check_lengths(h, rv);
  check_positive(h, rv);
  return mean_of(h.size(), [&](std::size_t i) { return std::log(h[i]) + rv[i] / h[i]; });
}

double r2log(std::span<const double> h, std::span<const double> rv) {
  check_lengths(h, rv);
  check_positive(h, rv);
  const std::size_t n = h.size();
  if (n < 2) fail(Errc::TooShort, "r2log needs at least two points");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(h[i]);
    y[i] = std::log(rv[i]);
  }
  const double mx = mean_of(n, [&](std::size_t i) { return x[i]; });
  const double my = mean_of(n, [&](std::size_t i) { return y[i]; });
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(syy > 0.0)) fail(Errc::DegenerateTruth, "ln rv has zero variance");
  // A constant forecast explains nothing: the fit is the intercept alone.
  if (!(sxx > 0.0)) return 0.0;
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - intercept - slope * x[i];
    ssr += e * e;
  }
  return 1.0 - ssr / syy;
}

double r2log_loss(std::span<const double> h, std::span<const double> rv) {
  check_lengths(h, rv);
  check_positive(h, rv);
  return mean_of(h.size(), [&](std::size_t i) {
    const double d = std::log(rv[i] / h[i]);
    return d * d;
  });
}

std::string_view group_name(Group g) {
  switch (g) {
    case Group::G1: return "G1";
    case Group::G2: return "G2";
    case Group::G3: return "G3";
    case Group::G4: return "G4";
  }
  return "?";
}

Group parse_group(std::string_view name) {
  for (Group g : kAllGroups)
    if (group_name(g) == name) return g;
  fail(Errc::BadParameter, "unknown ablation group '" + std::string(name) + "' (expected G1..G4)");
}

std::vector<std::string> group_columns(Group g) {
  std::vector<std::string> cols = {"TECH1", "TECH2", "TECH3"};
  if (g == Group::G2 || g == Group::G4) cols.push_back("BD1");
  if (g == Group::G3 || g == Group::G4) cols.push_back("h");
  return cols;
}

marketdata::Frame ablation_features(Group g, const marketdata::Frame& frame) {
  marketdata::Frame out;
  out.labels = frame.labels;
  for (const auto& name : group_columns(g)) {
    if (!frame.has_column(name))
      fail(Errc::MissingColumn, "feature column '" + name + "' is missing for " +
                                    std::string(group_name(g)));
    out.add_column(name, frame.column(name));
  }
  return out;
}

Baseline persistence_baseline(std::span<const double> rv) {
  if (rv.size() < 2) fail(Errc::TooShort, "persistence baseline needs at least two points");
  return {std::vector<double>(rv.begin(), rv.end() - 1), std::vector<double>(rv.begin() + 1, rv.end())};
}

ReportRow evaluate(std::string model, std::string group, std::span<const double> pred,
                   std::span<const double> truth) {
  check_lengths(pred, truth);
  std::vector<double> h, rv;
  ReportRow row{std::move(model), std::move(group)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!(truth[i] > 0.0)) {
      ++row.excluded;
      continue;
    }
    h.push_back(pred[i]);
    rv.push_back(truth[i]);
  }
  if (h.empty()) fail(Errc::NonPositiveTruth, "no pair has positive realized variance");
  row.n = h.size();
  row.mse = mse(h, rv);
  row.hmse = hmse(h, rv);
  row.mae = mae(h, rv);
  row.mape = mape(h, rv);
  row.qlike = qlike(h, rv);
  row.r2log = r2log(h, rv);
  return row;
}

std::string formula_notes() {
  return "MSE   = mean (rv - h)^2\n"
         "HMSE  = mean (1 - h/rv)^2\n"
         "MAE   = mean |rv - h|\n"
         "MAPE  = mean |1 - h/rv|\n"
         "QLIKE = mean (ln h + rv/h)\n"
         "R2LOG = R^2 of ln rv regressed on ln h (higher is better)\n"
         "pairs with rv <= 0 are excluded and counted\n";
}

void save_report(std::span<const ReportRow> rows, const std::filesystem::path& path) {
  csv::Writer w({"model", "group", "n", "mse", "hmse", "mae", "mape", "qlike", "r2log"});
  for (const auto& r : rows)
    w.row({r.model, r.group, std::to_string(r.n), csv::format(r.mse), csv::format(r.hmse),
           csv::format(r.mae), csv::format(r.mape), csv::format(r.qlike), csv::format(r.r2log)});
  w.save(path);
}

}  // namespace mfvol::evaluation
