#pragma once

// CSV result tables with a provenance block of '#' lines before the header.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace allee::io {

using Cell = std::variant<double, std::string>;

struct ResultTable {
  std::string schema;  // e.g. "simulate"
  int schema_version = 1;
  std::string config_hash;
  std::string toolkit_version;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws std::invalid_argument when the row width differs from columns.
  void add_row(std::vector<Cell> row);
};

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);

/// Parses a token written by format_double (including "nan", "inf", "-inf").
double parse_double(std::string_view s);

void write_csv(const ResultTable& t, std::ostream& os);

/// Writes to path, creating parent directories. Throws std::runtime_error
/// when the file cannot be written.
void write_csv_file(const ResultTable& t, const std::filesystem::path& path);

/// Reads a table written by write_csv. Cells that parse as numbers become
/// doubles, all others strings.
ResultTable read_csv(std::istream& is);
ResultTable read_csv_file(const std::filesystem::path& path);

}  // namespace allee::io
