#include "mfvol/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "mfvol/csv.hpp"
#include "mfvol/error.hpp"

namespace mfvol::pipeline {

namespace md = marketdata;
namespace gm = garch_midas;
namespace tf = transformer;
namespace ev = evaluation;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    fail(Errc::BadParameter, std::string(key) + ": '" + std::string(value) + "' is not a number");
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    fail(Errc::BadParameter, std::string(key) + ": '" + std::string(value) + "' is not a nonnegative integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(Errc::BadParameter, std::string(key) + ": expected true or false");
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto sz = [](std::size_t RunConfig::*field) {
      return [field](RunConfig& c, std::string_view k, std::string_view v) {
        c.*field = static_cast<std::size_t>(to_unsigned(k, v));
      };
    };
    auto dbl = [](double RunConfig::*field) {
      return [field](RunConfig& c, std::string_view k, std::string_view v) { c.*field = to_double(k, v); };
    };
    auto path = [](std::filesystem::path RunConfig::*field) {
      return [field](RunConfig& c, std::string_view, std::string_view v) { c.*field = std::string(v); };
    };
    t["out_dir"] = path(&RunConfig::out_dir);
    t["intraday"] = path(&RunConfig::intraday);
    t["daily"] = path(&RunConfig::daily);
    t["monthly"] = path(&RunConfig::monthly);
    t["attention"] = path(&RunConfig::attention);
    t["seed"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.seed = to_unsigned(k, v);
      c.train.seed = c.seed;
    };
    t["lags"] = sz(&RunConfig::lags);
    t["split_ratio"] = dbl(&RunConfig::split_ratio);
    t["fill"] = [](RunConfig& c, std::string_view, std::string_view v) {
      if (v == "ffill") c.fill = md::FillPolicy::ForwardFill;
      else if (v == "linear") c.fill = md::FillPolicy::Linear;
      else fail(Errc::BadParameter, "fill: expected ffill or linear");
    };
    t["restarts"] = sz(&RunConfig::restarts);
    t["window"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.train.window = to_unsigned(k, v); };
    t["learning_rate"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.train.learning_rate = to_double(k, v);
    };
    t["batch_size"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.train.batch_size = to_unsigned(k, v);
    };
    t["max_epochs"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.train.max_epochs = to_unsigned(k, v);
    };
    t["patience"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.train.patience = to_unsigned(k, v); };
    t["validation_fraction"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.train.validation_fraction = to_double(k, v);
    };
    t["clip_norm"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.train.clip_norm = to_double(k, v);
    };
    t["shuffle"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.train.shuffle = to_bool(k, v); };
    t["optimizer"] = [](RunConfig& c, std::string_view, std::string_view v) {
      if (v == "gd") c.train.optimizer = tf::Optimizer::GradientDescent;
      else if (v == "adam") c.train.optimizer = tf::Optimizer::Adam;
      else fail(Errc::BadParameter, "optimizer: expected gd or adam");
    };
    t["heads"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.model.heads = to_unsigned(k, v); };
    t["layers"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.model.layers = to_unsigned(k, v); };
    t["width"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.model.width = to_unsigned(k, v); };
    t["ff_width"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.model.ff_width = to_unsigned(k, v); };
    t["dropout"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.model.dropout = to_double(k, v); };
    t["group"] = [](RunConfig& c, std::string_view, std::string_view v) { c.group = ev::parse_group(v); };
    t["months"] = sz(&RunConfig::months);
    t["days_per_month"] = sz(&RunConfig::days_per_month);
    t["attention_coef"] = dbl(&RunConfig::attention_coef);
    t["overnight_share"] = dbl(&RunConfig::overnight_share);
    return t;
  }();
  return table;
}

std::vector<std::string> group_columns_of(const features::GroupSpec& g) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < g.retain; ++j) out.push_back(features::score_name(g, j));
  return out;
}

void save_split(const Split& s, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["rows"] = s.rows;
  j["train_rows"] = s.train_rows;
  j["first_test_date"] = s.first_test_date;
  csv::write_text(path, j.dump(2) + "\n");
}

Split load_split(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(csv::read_text(path));
  return {j.at("rows").get<std::size_t>(), j.at("train_rows").get<std::size_t>(),
          j.at("first_test_date").get<std::string>()};
}

bool before_test(const std::string& date, const Split& split) {
  return split.first_test_date.empty() || date < split.first_test_date;
}

/// Reads a CSV whose first column is a label and the rest are numbers.
md::Frame read_frame(const std::filesystem::path& path, const std::vector<std::string>& header) {
  const auto table = csv::read(path, header);
  md::Frame f;
  std::vector<std::vector<double>> cols(header.size() - 1);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    f.labels.push_back(table.rows[r][0]);
    for (std::size_t c = 1; c < header.size(); ++c)
      cols[c - 1].push_back(csv::parse_number(table.rows[r][c], table.line_numbers[r], false));
  }
  for (std::size_t c = 1; c < header.size(); ++c) f.add_column(header[c], std::move(cols[c - 1]));
  return f;
}

std::string model_name() { return "transformer"; }

}  // namespace

// --- configuration ----------------------------------------------------------

std::filesystem::path RunConfig::input(std::string_view name) const {
  const std::filesystem::path* explicit_path = nullptr;
  if (name == "intraday") explicit_path = &intraday;
  else if (name == "daily") explicit_path = &daily;
  else if (name == "monthly") explicit_path = &monthly;
  else if (name == "attention") explicit_path = &attention;
  if (explicit_path && !explicit_path->empty()) return *explicit_path;
  return out_dir / (std::string(name) + ".csv");
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) fail(Errc::BadParameter, "unknown setting '" + std::string(key) + "'");
  it->second(*this, key, trim(value));
}

void RunConfig::load_file(const std::filesystem::path& path) {
  const std::string text = csv::read_text(path);
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line =
        trim(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      set(trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : setters()) out.push_back(k);
  return out;
}

void RunConfig::validate() const {
  if (lags < 1) fail(Errc::BadParameter, "lags must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) fail(Errc::BadParameter, "split_ratio must be in (0, 1)");
  if (restarts < 1) fail(Errc::BadParameter, "restarts must be >= 1");
  model.validate();
  train.validate();
}

simlab::ScenarioSpec scenario_spec(const RunConfig& cfg) {
  simlab::ScenarioSpec s;
  s.seed = cfg.seed;
  s.months = cfg.months;
  s.days_per_month = cfg.days_per_month;
  s.lags = cfg.lags;
  s.attention_coef = cfg.attention_coef;
  s.intraday.overnight_share = cfg.overnight_share;
  return s;
}

// --- stages -----------------------------------------------------------------

simlab::Scenario run_simulate(const RunConfig& cfg) {
  auto sc = simlab::gen_full_scenario(scenario_spec(cfg));
  simlab::write_scenario(sc, cfg.out_dir);
  return sc;
}

realized_vol::RvSeries run_rv(const RunConfig& cfg) {
  cfg.validate();
  const auto series = md::load_intraday(cfg.input("intraday"));
  // Lambda only sees the training span of the days that carry a return.
  const std::size_t n_days = series.days().size();
  const std::size_t lambda_days = md::split_point(n_days > 0 ? n_days - 1 : 0, cfg.split_ratio);
  auto rv = realized_vol::compute(series, std::max<std::size_t>(lambda_days, 1));
  realized_vol::save(rv, cfg.output("rv.csv"), cfg.output("rv.json"));
  return rv;
}

features::FactorPanel run_pca(const RunConfig& cfg) {
  cfg.validate();
  const auto daily = md::load_daily(cfg.input("daily"));
  const auto monthly = md::load_monthly(cfg.input("monthly"));
  const auto attention = md::load_attention(cfg.input("attention"));
  const auto rv = realized_vol::load(cfg.output("rv.csv"), cfg.output("rv.json"));

  const std::vector<md::DatedColumn> extra = {{"rv_adj", rv.dates, rv.rv_adj}};
  auto panel = md::fill_missing(md::align_mixed_frequency(daily, attention, monthly, extra), cfg.fill);
  if (panel.rows() < 2) fail(Errc::EmptyPanel, "fewer than two aligned trading days");
  const std::size_t train_rows = md::split_point(panel.rows(), cfg.split_ratio);
  if (train_rows < 2) fail(Errc::EmptyPanel, "fewer than two training rows");

  const auto groups = features::default_groups();
  std::vector<std::string> daily_cols, monthly_cols;
  for (const auto& g : groups)
    (g.monthly ? monthly_cols : daily_cols).insert((g.monthly ? monthly_cols : daily_cols).end(),
                                                    g.columns.begin(), g.columns.end());

  // z-scores from training rows (daily) and training months (monthly).
  const auto daily_stats = md::normalize(panel.slice(0, train_rows), daily_cols).second;
  panel = md::normalize(std::move(panel), daily_cols, daily_stats).first;

  auto mframe = md::fill_missing(md::monthly_frame(monthly), cfg.fill);
  const std::size_t train_months = panel.month_index[train_rows - 1] + 1;
  md::Frame mtrain;
  mtrain.labels.assign(mframe.labels.begin(), mframe.labels.begin() + static_cast<std::ptrdiff_t>(train_months));
  for (const auto& c : mframe.columns)
    mtrain.add_column(c.name, std::vector<double>(c.values.begin(),
                                                  c.values.begin() + static_cast<std::ptrdiff_t>(train_months)));
  const auto monthly_stats = md::normalize(mtrain, monthly_cols).second;
  mframe = md::normalize(std::move(mframe), monthly_cols, monthly_stats).first;

  auto fp = features::extract_factor_panel(panel, mframe, groups, train_rows);

  std::vector<std::string> daily_scores, monthly_scores;
  for (const auto& g : groups) {
    const auto names = group_columns_of(g);
    (g.monthly ? monthly_scores : daily_scores).insert((g.monthly ? monthly_scores : daily_scores).end(),
                                                        names.begin(), names.end());
  }
  std::vector<std::string> header = {"date"};
  header.insert(header.end(), daily_scores.begin(), daily_scores.end());
  csv::Writer fw(header);
  for (std::size_t r = 0; r < fp.panel.rows(); ++r) {
    std::vector<std::string> row = {fp.panel.labels[r]};
    for (const auto& c : daily_scores) row.push_back(csv::format(fp.panel.column(c)[r]));
    fw.row(row);
  }
  fw.save(cfg.output("factors.csv"));

  header = {"month"};
  header.insert(header.end(), monthly_scores.begin(), monthly_scores.end());
  csv::Writer mw(header);
  for (std::size_t m = 0; m < fp.monthly.rows(); ++m) {
    std::vector<std::string> row = {fp.monthly.labels[m]};
    for (const auto& c : monthly_scores) row.push_back(csv::format(fp.monthly.column(c)[m]));
    mw.row(row);
  }
  mw.save(cfg.output("macro_factors.csv"));

  for (const auto& model : fp.models) features::save_model(model, cfg.output("pca_" + model.group + ".json"));
  save_split({panel.rows(), train_rows, train_rows < panel.rows() ? panel.labels[train_rows] : ""},
             cfg.output("split.json"));
  return fp;
}

gm::MidasFit run_midas_fit(const RunConfig& cfg) {
  cfg.validate();
  const auto rv = realized_vol::load(cfg.output("rv.csv"), cfg.output("rv.json"));
  const auto macro = read_frame(cfg.output("macro_factors.csv"), {"month", "PCM1", "PCM2"});
  const auto split = load_split(cfg.output("split.json"));

  std::unordered_map<std::string, std::size_t> month_pos;
  for (std::size_t m = 0; m < macro.rows(); ++m) month_pos.emplace(macro.labels[m], m);

  gm::MidasData all;
  for (std::size_t d = 0; d < rv.dates.size(); ++d) {
    const auto it = month_pos.find(rv.dates[d].substr(0, 7));
    if (it == month_pos.end()) fail(Errc::UncoveredMonth, rv.dates[d].substr(0, 7));
    all.returns.push_back(rv.ret[d]);
    all.month.push_back(it->second);
  }
  all.covariates = {macro.column("PCM1"), macro.column("PCM2")};

  gm::MidasData train = all;
  std::size_t n_train = 0;
  while (n_train < rv.dates.size() && before_test(rv.dates[n_train], split)) ++n_train;
  train.returns.resize(n_train);
  train.month.resize(n_train);

  const auto spec = gm::make_spec(gm::LongRunMode::Exogenous, cfg.lags, 2);
  gm::FitOptions opts;
  opts.restarts = cfg.restarts;
  opts.seed = cfg.seed;
  auto fit = gm::fit(spec, train, opts);
  // Filtering is causal, so the test-span values depend on training data only
  // through the fitted parameters.
  fit.series = gm::filter(spec, fit.params, all);
  gm::save_fit(fit, cfg.output("midas.json"));
  gm::save_series(fit.series, rv.dates, cfg.output("h.csv"));
  return fit;
}

ModelTable load_model_table(const RunConfig& cfg) {
  const auto factors = read_frame(cfg.output("factors.csv"), {"date", "TECH1", "TECH2", "TECH3", "BD1"});
  const auto hs = read_frame(cfg.output("h.csv"), {"date", "tau", "g", "h"});
  const auto rv = realized_vol::load(cfg.output("rv.csv"), cfg.output("rv.json"));
  const auto split = load_split(cfg.output("split.json"));

  std::unordered_map<std::string, std::size_t> h_pos, rv_pos;
  for (std::size_t i = 0; i < hs.rows(); ++i) h_pos.emplace(hs.labels[i], i);
  for (std::size_t i = 0; i < rv.dates.size(); ++i) rv_pos.emplace(rv.dates[i], i);

  ModelTable t;
  const std::vector<std::string> names = {"TECH1", "TECH2", "TECH3", "BD1", "h"};
  std::vector<std::vector<double>> cols(names.size());
  for (std::size_t r = 0; r < factors.rows(); ++r) {
    const auto& date = factors.labels[r];
    const auto hi = h_pos.find(date);
    const auto ri = rv_pos.find(date);
    if (hi == h_pos.end() || ri == rv_pos.end()) continue;
    t.dates.push_back(date);
    for (std::size_t c = 0; c < 4; ++c) cols[c].push_back(factors.column(names[c])[r]);
    cols[4].push_back(hs.column("h")[hi->second]);
    t.target.push_back(rv.rv_adj[ri->second]);
    if (before_test(date, split)) t.train_rows = t.dates.size();
  }
  if (t.dates.empty()) fail(Errc::EmptyDataset, "no day has factors, h and rv together");
  t.features.labels = t.dates;
  for (std::size_t c = 0; c < names.size(); ++c) t.features.add_column(names[c], std::move(cols[c]));
  return t;
}

TrainedModel fit_model(const ModelTable& table, const RunConfig& cfg, ev::Group group) {
  cfg.validate();
  TrainedModel m;
  m.group = group;
  m.columns = ev::group_columns(group);
  m.window = cfg.train.window;
  const std::size_t n = table.train_rows;
  if (n < m.window + 1) fail(Errc::EmptyDataset, "training span is shorter than one window plus a target");

  const auto sub = ev::ablation_features(group, table.features);
  tf::Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m.columns.size()));
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    const auto& v = sub.column(m.columns[c]);
    const auto [mean, sd] = md::zscore_stats(std::span(v).first(n), m.columns[c]);
    m.feature_means.push_back(mean);
    m.feature_stds.push_back(sd);
    for (std::size_t r = 0; r < n; ++r)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (v[r] - mean) / sd;
  }
  const std::span<const double> y = std::span(table.target).first(n);
  std::tie(m.target_mean, m.target_std) = md::zscore_stats(y, "rv_adj");
  m.floor = std::numeric_limits<double>::infinity();
  for (double v : y)
    if (v > 0.0) m.floor = std::min(m.floor, v);
  if (!std::isfinite(m.floor)) fail(Errc::NonPositiveTruth, "no positive training target");

  const auto data = tf::make_windows(x, y, std::span(table.dates).first(n), m.window,
                                     std::make_pair(m.target_mean, m.target_std));
  auto model_cfg = cfg.model;
  model_cfg.features = m.columns.size();
  auto train_cfg = cfg.train;
  train_cfg.seed = cfg.seed;
  m.result = tf::train(data, model_cfg, train_cfg);
  return m;
}

Predictions predict_test(const TrainedModel& m, const ModelTable& table) {
  const std::size_t begin = table.train_rows, n = table.dates.size() - begin;
  Predictions p;
  if (n < m.window + 1) return p;
  const auto sub = ev::ablation_features(m.group, table.features);
  tf::Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m.columns.size()));
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    const auto& v = sub.column(m.columns[c]);
    for (std::size_t r = 0; r < n; ++r)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          (v[begin + r] - m.feature_means[c]) / m.feature_stds[c];
  }
  const auto data = tf::make_windows(x, std::span(table.target).subspan(begin, n),
                                     std::span(table.dates).subspan(begin, n), m.window,
                                     std::make_pair(m.target_mean, m.target_std));
  p.dates = data.target_dates;
  p.truth = data.targets;
  p.pred = tf::predict(m.result.weights, data);
  for (auto& v : p.pred) v = std::max(v, m.floor);
  return p;
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["group"] = ev::group_name(m.group);
  j["columns"] = m.columns;
  j["window"] = m.window;
  j["feature_means"] = m.feature_means;
  j["feature_stds"] = m.feature_stds;
  j["target_mean"] = m.target_mean;
  j["target_std"] = m.target_std;
  j["floor"] = m.floor;
  j["epochs_run"] = m.result.epochs_run;
  j["stopped_early"] = m.result.stopped_early;
  j["loss_history"] = m.result.loss_history;
  j["validation_history"] = m.result.validation_history;
  j["weights"] = tf::to_json(m.result.weights);
  csv::write_text(path, j.dump(1) + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(csv::read_text(path));
    TrainedModel m;
    m.group = ev::parse_group(j.at("group").get<std::string>());
    m.columns = j.at("columns").get<std::vector<std::string>>();
    m.window = j.at("window").get<std::size_t>();
    m.feature_means = j.at("feature_means").get<std::vector<double>>();
    m.feature_stds = j.at("feature_stds").get<std::vector<double>>();
    m.target_mean = j.at("target_mean").get<double>();
    m.target_std = j.at("target_std").get<double>();
    m.floor = j.at("floor").get<double>();
    m.result.epochs_run = j.at("epochs_run").get<std::size_t>();
    m.result.stopped_early = j.at("stopped_early").get<bool>();
    m.result.loss_history = j.at("loss_history").get<std::vector<double>>();
    m.result.validation_history = j.value("validation_history", std::vector<double>{});
    m.result.weights = tf::weights_from_json(j.at("weights"));
    if (m.columns != ev::group_columns(m.group) || m.feature_means.size() != m.columns.size() ||
        m.feature_stds.size() != m.columns.size() || m.result.weights.config.features != m.columns.size())
      fail(Errc::BadShape, path.string() + ": model metadata is inconsistent");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::MalformedRow, path.string() + ": " + e.what());
  }
}

void save_predictions(const Predictions& p, const std::filesystem::path& path) {
  csv::Writer w({"date", "rv_true", "rv_pred"});
  for (std::size_t i = 0; i < p.dates.size(); ++i)
    w.row({p.dates[i], csv::format(p.truth[i]), csv::format(p.pred[i])});
  w.save(path);
}

Predictions load_predictions(const std::filesystem::path& path) {
  const auto f = read_frame(path, {"date", "rv_true", "rv_pred"});
  return {f.labels, f.column("rv_true"), f.column("rv_pred")};
}

TrainedModel run_train(const RunConfig& cfg) {
  const auto table = load_model_table(cfg);
  auto m = fit_model(table, cfg, cfg.group);
  save_model(m, cfg.output("model.json"));
  return m;
}

Predictions run_predict(const RunConfig& cfg) {
  const auto m = load_model(cfg.output("model.json"));
  const auto p = predict_test(m, load_model_table(cfg));
  if (p.dates.empty()) fail(Errc::EmptyDataset, "test span is shorter than one window plus a target");
  save_predictions(p, cfg.output("pred.csv"));
  return p;
}

std::vector<ev::ReportRow> run_evaluate(const RunConfig& cfg) {
  const auto p = load_predictions(cfg.output("pred.csv"));
  std::vector<ev::ReportRow> rows;
  rows.push_back(ev::evaluate(model_name(), std::string(ev::group_name(cfg.group)), p.pred, p.truth));
  if (p.truth.size() >= 3) {
    const auto base = ev::persistence_baseline(p.truth);
    rows.push_back(ev::evaluate("persistence", "-", base.pred, base.truth));
  }
  ev::save_report(rows, cfg.output("report.csv"));
  return rows;
}

std::vector<ev::ReportRow> run_ablate(const RunConfig& cfg) {
  const auto table = load_model_table(cfg);
  std::vector<ev::ReportRow> rows;
  for (ev::Group g : ev::kAllGroups) {
    const auto m = fit_model(table, cfg, g);
    const auto p = predict_test(m, table);
    if (p.dates.empty()) fail(Errc::EmptyDataset, "test span is shorter than one window plus a target");
    save_predictions(p, cfg.output("pred_" + std::string(ev::group_name(g)) + ".csv"));
    rows.push_back(ev::evaluate(model_name(), std::string(ev::group_name(g)), p.pred, p.truth));
  }
  ev::save_report(rows, cfg.output("ablation.csv"));
  return rows;
}

}  // namespace mfvol::pipeline
