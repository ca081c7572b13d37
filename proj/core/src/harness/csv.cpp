#include "apwb/harness/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace apwb::harness {

namespace {

constexpr std::array<std::string_view, 4> kProfile{"x", "rho", "q", "u"};
constexpr std::array<std::string_view, 5> kTable{"eps", "potential", "cells", "err_rho", "err_q"};
constexpr std::array<std::string_view, 3> kTimeSeries{"t", "max_q", "l1_rho_err"};

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void CsvTable::add_metadata(std::string key, std::string value) {
  metadata.emplace_back(std::move(key), std::move(value));
}

std::string CsvTable::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return {};
}

std::size_t CsvTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw CsvError("no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column_values(std::string_view name) const {
  const std::size_t k = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(parse_number(row[k]));
  return out;
}

std::vector<std::string> CsvTable::column_strings(std::string_view name) const {
  const std::size_t k = column_index(name);
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[k]);
  return out;
}

std::span<const std::string_view> schema_columns(CsvSchema schema) {
  switch (schema) {
    case CsvSchema::Profile: return kProfile;
    case CsvSchema::Table: return kTable;
    case CsvSchema::TimeSeries: return kTimeSeries;
  }
  return kProfile;
}

void validate_schema(const CsvTable& table, CsvSchema schema) {
  const auto expected = schema_columns(schema);
  if (table.columns.size() != expected.size())
    throw CsvError("expected " + std::to_string(expected.size()) + " columns, found " +
                   std::to_string(table.columns.size()));
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (table.columns[i] != expected[i])
      throw CsvError("column " + std::to_string(i) + ": expected '" + std::string(expected[i]) +
                     "', found '" + table.columns[i] + "'");
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t i = 0; i < expected.size(); ++i)
      if (expected[i] != "potential") (void)parse_number(table.rows[r][i]);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_number(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw CsvError("not a number: '" + std::string(s) + "'");
  return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (const auto& [k, v] : table.metadata) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw CsvError("row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot write '" + path.string() + "'");
  write_csv(out, table);
  if (!out) throw CsvError("write failed for '" + path.string() + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!have_header && !line.empty() && line.front() == '#') {
      std::string_view body(line);
      body.remove_prefix(1);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos)
        table.add_metadata(std::string(body), "");
      else
        table.add_metadata(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      continue;
    }
    if (line.empty()) continue;
    if (!have_header) {
      table.columns = split(line);
      have_header = true;
      continue;
    }
    auto row = split(line);
    if (row.size() != table.columns.size())
      throw CsvError("line " + std::to_string(line_no) + ": " + std::to_string(row.size()) +
                     " fields, header has " + std::to_string(table.columns.size()));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw CsvError("missing header row");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  return read_csv(in);
}

}  // namespace apwb::harness
