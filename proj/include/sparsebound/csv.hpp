#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sparsebound {

/// 17 significant digits, enough to read back the identical double.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Position of a header field; throws if absent.
  std::size_t column_index(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
  std::vector<std::string> text_column(std::string_view name) const;
};

/// Plain comma-separated values, no quoting (fields never contain commas).
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Parses a double written by format_double (accepts nan / inf).
double parse_double(std::string_view text);

}  // namespace sparsebound
