#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corf {

/// Line-oriented reader for comma-separated files. Handles CRLF line ends,
/// double-quoted fields and blank lines; keeps one row in memory.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path);

  /// Next non-blank record, or false at end of file.
  bool next(std::vector<std::string>& fields);
  /// 1-based line number of the record last returned.
  std::size_t line() const { return line_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

std::vector<std::string> split_csv_record(std::string_view line);

/// Parses a number; returns nullopt for text that is not a number. "NA",
/// "NaN", "inf" and empty cells parse to a non-finite value.
std::optional<double> parse_number(std::string_view text);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

}  // namespace corf
