#include "mfvol/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfvol/error.hpp"

namespace mfvol::csv {

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  for (auto& f : fields) {
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    std::size_t lead = 0;
    while (lead < f.size() && (f[lead] == ' ' || f[lead] == '\t')) ++lead;
    f.erase(0, lead);
  }
  return fields;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i];
  }
  return s;
}

}  // namespace

std::size_t Table::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  fail(Errc::MissingColumn, std::string(name));
}

Table read(const std::filesystem::path& path, const std::vector<std::string>& expected) {
  std::ifstream in(path);
  if (!in) fail(Errc::MissingFile, path.string());

  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      if (!expected.empty() && table.header != expected)
        fail(Errc::MalformedRow, path.string() + " line " + std::to_string(line_no) +
                                     ": header '" + join(table.header) + "', expected '" +
                                     join(expected) + "'");
      continue;
    }
    if (fields.size() != table.header.size())
      fail(Errc::MalformedRow, path.string() + " line " + std::to_string(line_no) + ": " +
                                   std::to_string(fields.size()) + " fields, expected " +
                                   std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) fail(Errc::MalformedRow, path.string() + ": empty file");
  return table;
}

double parse_number(std::string_view field, std::size_t line, bool allow_missing) {
  if (field.empty()) {
    if (allow_missing) return std::numeric_limits<double>::quiet_NaN();
    fail(Errc::MalformedRow, "line " + std::to_string(line) + ": missing value");
  }
  double value = 0.0;
  const auto* first = field.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value))
    fail(Errc::MalformedRow, "line " + std::to_string(line) + ": bad number '" +
                                 std::string(field) + "'");
  return value;
}

long parse_integer(std::string_view field, std::size_t line) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
    fail(Errc::MalformedRow, "line " + std::to_string(line) + ": bad integer '" +
                                 std::string(field) + "'");
  return value;
}

std::string format(double value) {
  if (std::isnan(value)) return {};
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Writer::Writer(std::vector<std::string> header) : width_(header.size()) {
  out_ = join(header);
  out_ += '\n';
}

Writer& Writer::row(std::initializer_list<std::string> fields) {
  return row(std::vector<std::string>(fields));
}

Writer& Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) fail(Errc::BadShape, "csv row width");
  out_ += join(fields);
  out_ += '\n';
  return *this;
}

void Writer::save(const std::filesystem::path& path) const { write_text(path, out_); }

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::MissingFile, "cannot write " + path.string());
  out << content;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mfvol::csv
