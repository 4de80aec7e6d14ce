#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aerochan {

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless

  bool operator==(const Column&) const = default;
};

/// Rectangular numeric table with ordered metadata.
struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<double> row);
  void set_meta(const std::string& key, const std::string& value);
  const std::string* meta(const std::string& key) const;

  std::size_t column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;

  /// Throws NumericError if ragged or a column lacks a unit.
  void validate() const;

  bool operator==(const ResultTable&) const = default;
};

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(std::string_view name);

/// CSV: `# key: value` metadata lines, a header of `name [unit]` cells, then
/// rows in scientific notation with 9 significant digits.
std::string format_csv(const ResultTable& table);
ResultTable parse_csv(std::string_view text);

/// Structured record: {"metadata": {...}, "columns": [...], "rows": [...]}.
std::string format_json(const ResultTable& table);
ResultTable parse_json(std::string_view text);

/// Writes atomically enough for our purposes (truncate + write). Throws
/// IoError carrying the path.
void write_results(const ResultTable& table, const std::filesystem::path& path,
                   OutputFormat format);

/// Reads either format; JSON is recognised by a leading '{'.
ResultTable read_results(const std::filesystem::path& path);

}  // namespace aerochan
