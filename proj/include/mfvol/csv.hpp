#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace mfvol::csv {

/// A parsed comma-separated file. Fields are kept as text; `line_numbers[i]`
/// is the 1-based source line of `rows[i]` for diagnostics.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t column_index(std::string_view name) const;
};

/// Reads `path` and checks the header matches `expected` exactly (when
/// non-empty). Throws MissingFile / MalformedRow.
Table read(const std::filesystem::path& path, const std::vector<std::string>& expected = {});

/// Parses a decimal field. Empty fields yield NaN when `allow_missing`,
/// otherwise MalformedRow naming the line.
double parse_number(std::string_view field, std::size_t line, bool allow_missing);

long parse_integer(std::string_view field, std::size_t line);

/// Shortest text that reads back to the same double; NaN prints as an empty field.
std::string format(double value);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  Writer& row(std::initializer_list<std::string> fields);
  Writer& row(const std::vector<std::string>& fields);

  std::string str() const { return out_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string out_;
};

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace mfvol::csv
