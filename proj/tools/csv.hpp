#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gliomics::cli {

/// Comma-separated table with a header row. Lines starting with '#' are
/// comments; quoting is not supported (fields are paths, ids and numbers).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;

  /// Column position or -1.
  int column(const std::string& name) const;
  /// Throws ParseError naming the missing column.
  std::size_t require(const std::string& name) const;
};

/// Throws MissingFile or ParseError (ragged rows, quotes, no header).
CsvTable read_csv(const std::filesystem::path& path);

std::string join(const std::vector<std::string>& fields, char sep = ',');
std::vector<std::string> split(const std::string& text, char sep = ',');

/// Shortest text that reads back to the same double; "nan" for NaN.
std::string format_number(double v);

/// Strict numeric parse; throws ParseError with the context.
double parse_number(const std::string& text, const std::string& context);
int parse_int(const std::string& text, const std::string& context);

}  // namespace gliomics::cli
