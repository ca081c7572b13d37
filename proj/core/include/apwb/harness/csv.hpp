#pragma once

// CSV files with '#'-prefixed `key=value` metadata lines followed by a header
// row and data rows. Numbers are written in shortest round-trip form.

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace apwb::harness {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_metadata(std::string key, std::string value);
  /// First metadata value for `key`, or empty.
  std::string meta(std::string_view key) const;

  std::size_t column_index(std::string_view name) const;  ///< throws CsvError
  std::vector<double> column_values(std::string_view name) const;
  std::vector<std::string> column_strings(std::string_view name) const;
};

/// Column sets of the three file kinds.
enum class CsvSchema { Profile, Table, TimeSeries };
std::span<const std::string_view> schema_columns(CsvSchema schema);
/// Throws CsvError naming the first mismatching column.
void validate_schema(const CsvTable& table, CsvSchema schema);

std::string format_number(double v);
double parse_number(std::string_view s);  ///< throws CsvError

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace apwb::harness
