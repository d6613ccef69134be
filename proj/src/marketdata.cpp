#include "mfvol/marketdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "mfvol/csv.hpp"
#include "mfvol/error.hpp"

namespace mfvol::marketdata {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + " line " + std::to_string(line);
}

template <std::size_t N>
std::vector<std::string> header_with(std::string_view key,
                                     const std::array<std::string_view, N>& cols) {
  std::vector<std::string> h{std::string(key)};
  for (auto c : cols) h.emplace_back(c);
  return h;
}

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void fill_columns(std::vector<Column>& columns, FillPolicy policy,
                  const std::vector<std::string>& names) {
  for (auto& col : columns) {
    if (!names.empty() && std::find(names.begin(), names.end(), col.name) == names.end())
      continue;
    auto& v = col.values;
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!std::isnan(v[i])) present.push_back(i);
    if (present.empty()) {
      if (v.empty()) continue;
      fail(Errc::AllMissingColumn, col.name);
    }
    for (std::size_t i = 0; i < present.front(); ++i) v[i] = v[present.front()];
    if (policy == FillPolicy::ForwardFill) {
      for (std::size_t i = present.front() + 1; i < v.size(); ++i)
        if (std::isnan(v[i])) v[i] = v[i - 1];
    } else {
      for (std::size_t k = 0; k + 1 < present.size(); ++k) {
        const std::size_t a = present[k], b = present[k + 1];
        for (std::size_t i = a + 1; i < b; ++i) {
          const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
          v[i] = (1.0 - w) * v[a] + w * v[b];
        }
      }
      for (std::size_t i = present.back() + 1; i < v.size(); ++i) v[i] = v[present.back()];
    }
  }
}

NormalizationStats normalize_columns(std::vector<Column>& columns,
                                     const std::vector<std::string>& names,
                                     const std::optional<NormalizationStats>& given) {
  NormalizationStats stats;
  for (const auto& name : names) {
    auto it = std::find_if(columns.begin(), columns.end(),
                           [&](const Column& c) { return c.name == name; });
    if (it == columns.end()) fail(Errc::MissingColumn, name);
    double mean = 0.0, sd = 1.0;
    if (given) {
      const auto idx = given->find(name);
      if (!idx) fail(Errc::MissingColumn, name + " (not in normalization stats)");
      mean = given->means[*idx];
      sd = given->stds[*idx];
    } else {
      std::tie(mean, sd) = zscore_stats(it->values, name);
    }
    for (auto& x : it->values) x = (x - mean) / sd;
    stats.names.push_back(name);
    stats.means.push_back(mean);
    stats.stds.push_back(sd);
  }
  return stats;
}

void assign_day_indices(AlignedPanel& panel) {
  panel.day_in_month.assign(panel.rows(), 0);
  for (std::size_t r = 0; r < panel.rows(); ++r) {
    const bool same = r > 0 && panel.month_index[r] == panel.month_index[r - 1];
    panel.day_in_month[r] = same ? panel.day_in_month[r - 1] + 1 : 1;
  }
}

}  // namespace

// --- Frame ------------------------------------------------------------------

bool Frame::has_column(std::string_view name) const {
  return std::any_of(columns.begin(), columns.end(),
                     [&](const Column& c) { return c.name == name; });
}

const std::vector<double>& Frame::column(std::string_view name) const {
  for (const auto& c : columns)
    if (c.name == name) return c.values;
  fail(Errc::MissingColumn, std::string(name));
}

std::vector<double>& Frame::column(std::string_view name) {
  for (auto& c : columns)
    if (c.name == name) return c.values;
  fail(Errc::MissingColumn, std::string(name));
}

void Frame::add_column(std::string name, std::vector<double> values) {
  if (values.size() != rows()) fail(Errc::BadShape, "column " + name + " length");
  for (auto& c : columns)
    if (c.name == name) {
      c.values = std::move(values);
      return;
    }
  columns.push_back({std::move(name), std::move(values)});
}

std::vector<std::string> Frame::column_names() const {
  std::vector<std::string> names;
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

AlignedPanel AlignedPanel::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, rows());
  begin = std::min(begin, end);
  AlignedPanel out;
  const auto b = static_cast<std::ptrdiff_t>(begin), e = static_cast<std::ptrdiff_t>(end);
  out.labels.assign(labels.begin() + b, labels.begin() + e);
  out.months.assign(months.begin() + b, months.begin() + e);
  out.month_index.assign(month_index.begin() + b, month_index.begin() + e);
  out.day_in_month.assign(day_in_month.begin() + b, day_in_month.begin() + e);
  for (const auto& c : columns)
    out.columns.push_back({c.name, {c.values.begin() + b, c.values.begin() + e}});
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> AlignedPanel::days_per_month() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < rows(); ++r) {
    if (out.empty() || out.back().first != month_index[r])
      out.emplace_back(month_index[r], 0);
    ++out.back().second;
  }
  return out;
}

std::optional<std::size_t> NormalizationStats::find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

// --- IntradaySeries ---------------------------------------------------------

std::vector<IntradaySeries::Day> IntradaySeries::days() const {
  std::vector<Day> out;
  for (std::size_t i = 0; i < bars.size(); ++i) {
    if (out.empty() || out.back().date != bars[i].date) out.push_back({bars[i].date, i, i});
    out.back().end = i + 1;
  }
  return out;
}

// --- dates ------------------------------------------------------------------

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) || !all_digits(s.substr(8, 2)))
    return false;
  const int m = std::stoi(std::string(s.substr(5, 2)));
  const int d = std::stoi(std::string(s.substr(8, 2)));
  return m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

bool is_iso_month(std::string_view s) {
  if (s.size() != 7 || s[4] != '-') return false;
  if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2))) return false;
  const int m = std::stoi(std::string(s.substr(5, 2)));
  return m >= 1 && m <= 12;
}

std::string next_month(std::string_view month) {
  int y = std::stoi(std::string(month.substr(0, 4)));
  int m = std::stoi(std::string(month.substr(5, 2))) + 1;
  if (m > 12) {
    m = 1;
    ++y;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d", y, m);
  return buf;
}

// --- loaders ----------------------------------------------------------------

IntradaySeries load_intraday(const std::filesystem::path& path) {
  const auto table = csv::read(path, {"date", "time_min", "price"});
  IntradaySeries series;
  series.instrument = path.stem().string();
  std::unordered_map<std::string, std::size_t> per_day;
  std::vector<std::size_t> lines;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const auto line = table.line_numbers[r];
    if (!is_iso_date(f[0])) fail(Errc::MalformedRow, where(path, line) + ": bad date");
    const long t = csv::parse_integer(f[1], line);
    if (t < 0) fail(Errc::MalformedRow, where(path, line) + ": negative time_min");
    const double price = csv::parse_number(f[2], line, false);
    if (!(price > 0.0)) fail(Errc::NonPositivePrice, where(path, line));
    if (++per_day[f[0]] > kMaxBarsPerDay)
      fail(Errc::MalformedRow, where(path, line) + ": more than " +
                                   std::to_string(kMaxBarsPerDay) + " bars on " + f[0]);
    series.bars.push_back({f[0], static_cast<int>(t), price});
  }
  std::stable_sort(series.bars.begin(), series.bars.end(), [](const Bar& a, const Bar& b) {
    return a.date != b.date ? a.date < b.date : a.time_min < b.time_min;
  });
  for (std::size_t i = 1; i < series.bars.size(); ++i) {
    const auto& a = series.bars[i - 1];
    const auto& b = series.bars[i];
    if (a.date == b.date && a.time_min == b.time_min)
      fail(Errc::DuplicateBar, b.date + " " + std::to_string(b.time_min));
  }
  return series;
}

std::vector<DailyRecord> load_daily(const std::filesystem::path& path) {
  const auto table = csv::read(path, header_with("date", kDailyColumns));
  std::vector<DailyRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const auto line = table.line_numbers[r];
    DailyRecord rec;
    rec.date = f[0];
    if (!is_iso_date(rec.date)) fail(Errc::MalformedRow, where(path, line) + ": bad date");
    if (!out.empty() && !(out.back().date < rec.date))
      fail(Errc::MalformedRow, where(path, line) + ": dates not strictly increasing");
    for (std::size_t c = 0; c < kDailyColumns.size(); ++c)
      rec.values[c] = csv::parse_number(f[c + 1], line, true);
    for (std::size_t c = 0; c < 4; ++c)
      if (rec.values[c] <= 0.0) fail(Errc::NonPositivePrice, where(path, line));
    const double lo = rec.low(), hi = rec.high();
    for (double p : {rec.open(), rec.close()})
      if (!std::isnan(p) && ((!std::isnan(lo) && p < lo) || (!std::isnan(hi) && p > hi)))
        fail(Errc::MalformedRow, where(path, line) + ": price outside [low, high]");
    if (rec.values[4] < 0.0) fail(Errc::MalformedRow, where(path, line) + ": negative volume");
    out.push_back(rec);
  }
  return out;
}

std::vector<MonthlyRecord> load_monthly(const std::filesystem::path& path) {
  const auto table = csv::read(path, header_with("month", kMonthlyColumns));
  std::vector<MonthlyRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const auto line = table.line_numbers[r];
    MonthlyRecord rec;
    rec.month = f[0];
    if (!is_iso_month(rec.month)) fail(Errc::MalformedRow, where(path, line) + ": bad month");
    if (!out.empty() && rec.month != next_month(out.back().month)) {
      if (rec.month <= out.back().month)
        fail(Errc::MalformedRow, where(path, line) + ": months out of order");
      fail(Errc::NonContiguousMonths, where(path, line) + ": gap after " + out.back().month);
    }
    for (std::size_t c = 0; c < kMonthlyColumns.size(); ++c)
      rec.values[c] = csv::parse_number(f[c + 1], line, true);
    out.push_back(rec);
  }
  return out;
}

std::vector<AttentionRecord> load_attention(const std::filesystem::path& path) {
  const auto table = csv::read(path, header_with("date", kAttentionColumns));
  std::vector<AttentionRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const auto line = table.line_numbers[r];
    AttentionRecord rec;
    rec.date = f[0];
    if (!is_iso_date(rec.date)) fail(Errc::MalformedRow, where(path, line) + ": bad date");
    if (!out.empty() && !(out.back().date < rec.date))
      fail(Errc::MalformedRow, where(path, line) + ": dates not strictly increasing");
    for (std::size_t c = 0; c < kAttentionColumns.size(); ++c) {
      rec.values[c] = csv::parse_number(f[c + 1], line, true);
      if (rec.values[c] < 0.0)
        fail(Errc::MalformedRow, where(path, line) + ": negative attention index");
    }
    out.push_back(rec);
  }
  return out;
}

void save_intraday(const IntradaySeries& series, const std::filesystem::path& path) {
  csv::Writer w({"date", "time_min", "price"});
  for (const auto& b : series.bars)
    w.row({b.date, std::to_string(b.time_min), csv::format(b.price)});
  w.save(path);
}

namespace {
template <std::size_t N, class Rec, class KeyFn>
void save_records(std::span<const Rec> rows, std::string_view key,
                  const std::array<std::string_view, N>& cols, KeyFn key_of,
                  const std::filesystem::path& path) {
  csv::Writer w(header_with(key, cols));
  for (const auto& rec : rows) {
    std::vector<std::string> fields{key_of(rec)};
    for (double v : rec.values) fields.push_back(csv::format(v));
    w.row(fields);
  }
  w.save(path);
}
}  // namespace

void save_daily(std::span<const DailyRecord> rows, const std::filesystem::path& path) {
  save_records(rows, "date", kDailyColumns, [](const DailyRecord& r) { return r.date; }, path);
}

void save_monthly(std::span<const MonthlyRecord> rows, const std::filesystem::path& path) {
  save_records(rows, "month", kMonthlyColumns, [](const MonthlyRecord& r) { return r.month; },
               path);
}

void save_attention(std::span<const AttentionRecord> rows, const std::filesystem::path& path) {
  save_records(rows, "date", kAttentionColumns, [](const AttentionRecord& r) { return r.date; },
               path);
}

// --- transformations --------------------------------------------------------

Frame fill_missing(Frame frame, FillPolicy policy, const std::vector<std::string>& columns) {
  fill_columns(frame.columns, policy, columns);
  return frame;
}

AlignedPanel fill_missing(AlignedPanel panel, FillPolicy policy,
                          const std::vector<std::string>& columns) {
  fill_columns(panel.columns, policy, columns);
  return panel;
}

std::pair<double, double> zscore_stats(std::span<const double> values, std::string_view name) {
  if (values.empty()) fail(Errc::EmptyPanel, std::string(name));
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));
  if (!std::isfinite(mean) || !std::isfinite(sd))
    fail(Errc::NonFiniteInput, std::string(name) + " contains missing or non-finite values");
  if (sd == 0.0) fail(Errc::ZeroVariance, std::string(name));
  return {mean, sd};
}

std::pair<Frame, NormalizationStats> normalize(Frame frame, const std::vector<std::string>& columns,
                                               const std::optional<NormalizationStats>& stats) {
  auto s = normalize_columns(frame.columns, columns, stats);
  return {std::move(frame), std::move(s)};
}

std::pair<AlignedPanel, NormalizationStats> normalize(
    AlignedPanel panel, const std::vector<std::string>& columns,
    const std::optional<NormalizationStats>& stats) {
  auto s = normalize_columns(panel.columns, columns, stats);
  return {std::move(panel), std::move(s)};
}

Frame denormalize(Frame frame, const NormalizationStats& stats) {
  for (std::size_t i = 0; i < stats.names.size(); ++i)
    for (auto& x : frame.column(stats.names[i])) x = x * stats.stds[i] + stats.means[i];
  return frame;
}

AlignedPanel align_mixed_frequency(std::span<const DailyRecord> daily,
                                   std::span<const AttentionRecord> attention,
                                   std::span<const MonthlyRecord> monthly,
                                   std::span<const DatedColumn> extra) {
  std::map<std::string, std::size_t> month_pos;
  for (std::size_t m = 0; m < monthly.size(); ++m) month_pos.emplace(monthly[m].month, m);
  std::unordered_map<std::string, std::size_t> att_pos;
  for (std::size_t a = 0; a < attention.size(); ++a) att_pos.emplace(attention[a].date, a);
  std::vector<std::unordered_map<std::string, double>> extra_maps;
  for (const auto& e : extra) {
    if (e.dates.size() != e.values.size()) fail(Errc::LengthMismatch, e.name);
    auto& mp = extra_maps.emplace_back();
    for (std::size_t i = 0; i < e.dates.size(); ++i) mp.emplace(e.dates[i], e.values[i]);
  }

  AlignedPanel panel;
  std::vector<std::vector<double>> daily_cols(kDailyColumns.size());
  std::vector<std::vector<double>> att_cols(kAttentionColumns.size());
  std::vector<std::vector<double>> mon_cols(kMonthlyColumns.size());
  std::vector<std::vector<double>> extra_cols(extra.size());

  for (const auto& rec : daily) {
    bool joined = true;
    for (const auto& mp : extra_maps) joined = joined && mp.count(rec.date) > 0;
    if (!joined) continue;
    const std::string month = rec.date.substr(0, 7);
    const auto mit = month_pos.find(month);
    if (mit == month_pos.end()) fail(Errc::UncoveredMonth, month);
    if (!panel.labels.empty() && !(panel.labels.back() < rec.date))
      fail(Errc::MalformedRow, "daily dates not strictly increasing at " + rec.date);

    panel.labels.push_back(rec.date);
    panel.months.push_back(month);
    panel.month_index.push_back(mit->second);
    for (std::size_t c = 0; c < kDailyColumns.size(); ++c) daily_cols[c].push_back(rec.values[c]);
    const auto ait = att_pos.find(rec.date);
    for (std::size_t c = 0; c < kAttentionColumns.size(); ++c)
      att_cols[c].push_back(ait == att_pos.end() ? std::nan("")
                                                 : attention[ait->second].values[c]);
    for (std::size_t c = 0; c < kMonthlyColumns.size(); ++c)
      mon_cols[c].push_back(monthly[mit->second].values[c]);
    for (std::size_t e = 0; e < extra.size(); ++e) extra_cols[e].push_back(extra_maps[e][rec.date]);
  }

  for (std::size_t c = 0; c < kDailyColumns.size(); ++c)
    panel.columns.push_back({std::string(kDailyColumns[c]), std::move(daily_cols[c])});
  for (std::size_t c = 0; c < kAttentionColumns.size(); ++c)
    panel.columns.push_back({std::string(kAttentionColumns[c]), std::move(att_cols[c])});
  for (std::size_t c = 0; c < kMonthlyColumns.size(); ++c)
    panel.columns.push_back({std::string(kMonthlyColumns[c]), std::move(mon_cols[c])});
  for (std::size_t e = 0; e < extra.size(); ++e)
    panel.columns.push_back({extra[e].name, std::move(extra_cols[e])});
  assign_day_indices(panel);
  return panel;
}

Frame monthly_frame(std::span<const MonthlyRecord> monthly) {
  Frame f;
  for (const auto& rec : monthly) f.labels.push_back(rec.month);
  for (std::size_t c = 0; c < kMonthlyColumns.size(); ++c) {
    std::vector<double> v;
    for (const auto& rec : monthly) v.push_back(rec.values[c]);
    f.columns.push_back({std::string(kMonthlyColumns[c]), std::move(v)});
  }
  return f;
}

std::size_t split_point(std::size_t n, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) fail(Errc::BadParameter, "split ratio must be in (0, 1)");
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
}

std::pair<AlignedPanel, AlignedPanel> chronological_split(const AlignedPanel& panel, double ratio) {
  if (panel.rows() == 0) fail(Errc::EmptyPanel, "cannot split an empty panel");
  const std::size_t cut = split_point(panel.rows(), ratio);
  return {panel.slice(0, cut), panel.slice(cut, panel.rows())};
}

}  // namespace mfvol::marketdata
