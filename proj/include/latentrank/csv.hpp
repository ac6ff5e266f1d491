#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "latentrank/errors.hpp"

namespace latentrank {

/// The input file does not exist or cannot be opened.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Headered delimited text. Fields may be double-quoted, with "" as an
/// escaped quote; blank lines are skipped and a UTF-8 byte order mark is
/// ignored.
class CsvTable {
 public:
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
  /// 1-based source line of data row i.
  std::size_t line_of(std::size_t i) const { return lines_[i]; }

  /// Throws InvalidData when the column is absent.
  std::size_t column_index(std::string_view name) const;
  std::vector<std::string> text_column(std::string_view name) const;
  /// Every cell must parse completely as a finite number; otherwise throws
  /// InvalidData naming the line and column.
  std::vector<double> numeric_column(std::string_view name) const;

  friend CsvTable parse_csv(std::istream& in, char delimiter);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

/// Throws InvalidData with a line number on ragged rows, unterminated quotes
/// or duplicate column names.
CsvTable parse_csv(std::istream& in, char delimiter = ',');

/// Throws InputError when the file cannot be opened.
CsvTable read_csv_file(const std::filesystem::path& path, char delimiter = ',');

}  // namespace latentrank
