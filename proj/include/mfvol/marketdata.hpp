#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mfvol::marketdata {

/// Bars per trading day on the 5-minute grid of a four-hour session.
inline constexpr std::size_t kMaxBarsPerDay = 48;

struct Bar {
  std::string date;  // YYYY-MM-DD
  int time_min = 0;  // minutes from market open
  double price = 0.0;
};

struct IntradaySeries {
  std::string instrument;
  std::vector<Bar> bars;  // ordered by (date, time_min)

  struct Day {
    std::string date;
    std::size_t begin = 0;  // index range into bars
    std::size_t end = 0;
  };
  std::vector<Day> days() const;
};

inline constexpr std::array<std::string_view, 13> kDailyColumns = {
    "open", "high", "low", "close", "volume", "turn", "boll",
    "ma5",  "ma20", "macd", "rsi", "sobv", "roc"};
inline constexpr std::array<std::string_view, 10> kMonthlyColumns = {
    "meci", "melei", "melai", "cpi", "retailsale", "rpi", "ppi", "m2", "finvest", "iop"};
inline constexpr std::array<std::string_view, 5> kAttentionColumns = {
    "csi300", "csi500", "sse50", "hsparts", "hsetf"};

/// One row of the daily file; values follow kDailyColumns order, NaN = missing.
struct DailyRecord {
  std::string date;
  std::array<double, kDailyColumns.size()> values{};

  double open() const { return values[0]; }
  double high() const { return values[1]; }
  double low() const { return values[2]; }
  double close() const { return values[3]; }
};

struct MonthlyRecord {
  std::string month;  // YYYY-MM
  std::array<double, kMonthlyColumns.size()> values{};
};

struct AttentionRecord {
  std::string date;
  std::array<double, kAttentionColumns.size()> values{};
};

struct Column {
  std::string name;
  std::vector<double> values;
};

/// Rows with a text label and named numeric columns; NaN marks a missing cell.
struct Frame {
  std::vector<std::string> labels;
  std::vector<Column> columns;

  std::size_t rows() const { return labels.size(); }
  bool has_column(std::string_view name) const;
  const std::vector<double>& column(std::string_view name) const;
  std::vector<double>& column(std::string_view name);
  void add_column(std::string name, std::vector<double> values);
  std::vector<std::string> column_names() const;
};

/// Per-trading-day rows carrying daily columns plus the covariates of the
/// row's calendar month, repeated within the month. `labels` are dates.
struct AlignedPanel : Frame {
  std::vector<std::string> months;       // YYYY-MM of each row
  std::vector<std::size_t> month_index;  // t: position of the month in the monthly table
  std::vector<int> day_in_month;         // i: 1..N_t

  const std::vector<std::string>& dates() const { return labels; }
  AlignedPanel slice(std::size_t begin, std::size_t end) const;
  /// (month_index, N_t) for every month present, in row order.
  std::vector<std::pair<std::size_t, std::size_t>> days_per_month() const;
};

/// A daily series to inner-join into a panel by date (e.g. returns, RV).
struct DatedColumn {
  std::string name;
  std::vector<std::string> dates;
  std::vector<double> values;
};

enum class FillPolicy { ForwardFill, Linear };

struct NormalizationStats {
  std::vector<std::string> names;
  std::vector<double> means;
  std::vector<double> stds;

  std::optional<std::size_t> find(std::string_view name) const;
};

// --- loading / saving -------------------------------------------------------

IntradaySeries load_intraday(const std::filesystem::path& path);
std::vector<DailyRecord> load_daily(const std::filesystem::path& path);
std::vector<MonthlyRecord> load_monthly(const std::filesystem::path& path);
std::vector<AttentionRecord> load_attention(const std::filesystem::path& path);

void save_intraday(const IntradaySeries& series, const std::filesystem::path& path);
void save_daily(std::span<const DailyRecord> rows, const std::filesystem::path& path);
void save_monthly(std::span<const MonthlyRecord> rows, const std::filesystem::path& path);
void save_attention(std::span<const AttentionRecord> rows, const std::filesystem::path& path);

bool is_iso_date(std::string_view s);
bool is_iso_month(std::string_view s);
/// YYYY-MM of the following calendar month.
std::string next_month(std::string_view month);

// --- transformations --------------------------------------------------------

/// Fills NaN cells of the named columns (all columns when empty).
Frame fill_missing(Frame frame, FillPolicy policy = FillPolicy::ForwardFill,
                   const std::vector<std::string>& columns = {});
AlignedPanel fill_missing(AlignedPanel panel, FillPolicy policy = FillPolicy::ForwardFill,
                          const std::vector<std::string>& columns = {});

/// Z-scores the named columns with population statistics (divisor n). When
/// `stats` is given it is applied as-is; otherwise it is computed from `frame`.
std::pair<Frame, NormalizationStats> normalize(Frame frame, const std::vector<std::string>& columns,
                                               const std::optional<NormalizationStats>& stats = {});
std::pair<AlignedPanel, NormalizationStats> normalize(
    AlignedPanel panel, const std::vector<std::string>& columns,
    const std::optional<NormalizationStats>& stats = {});
Frame denormalize(Frame frame, const NormalizationStats& stats);

/// Mean and population standard deviation; throws ZeroVariance when the std is 0.
std::pair<double, double> zscore_stats(std::span<const double> values, std::string_view name);

AlignedPanel align_mixed_frequency(std::span<const DailyRecord> daily,
                                   std::span<const AttentionRecord> attention,
                                   std::span<const MonthlyRecord> monthly,
                                   std::span<const DatedColumn> extra = {});

Frame monthly_frame(std::span<const MonthlyRecord> monthly);

/// floor(n * ratio), guarded against representation error in `ratio`.
std::size_t split_point(std::size_t n, double ratio);
std::pair<AlignedPanel, AlignedPanel> chronological_split(const AlignedPanel& panel, double ratio);

}  // namespace mfvol::marketdata
