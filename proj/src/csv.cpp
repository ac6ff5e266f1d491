#include "latentrank/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace latentrank {

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// Splits one record starting at the current position. Quoted fields may span
// physical lines, so `line` is advanced for each embedded newline.
bool read_record(std::istream& in, char delimiter, std::vector<std::string>& fields,
                 std::size_t& line) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  const std::size_t start_line = line + 1;
  for (int ch = in.get(); ch != std::char_traits<char>::eof(); ch = in.get()) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field += c;
    }
  }
  if (quoted) throw InvalidData(at_line(start_line) + "unterminated quoted field");
  if (!any) return false;
  ++line;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(std::move(field));
  return true;
}

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields.front().find_first_not_of(" \t") == std::string::npos;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

CsvTable parse_csv(std::istream& in, char delimiter) {
  CsvTable table;
  std::vector<std::string> fields;
  std::size_t line = 0;

  // Byte order mark.
  if (in.peek() == 0xEF) {
    char bom[3];
    in.read(bom, 3);
    if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
      in.seekg(0);
    }
  }

  while (read_record(in, delimiter, fields, line)) {
    if (blank(fields)) continue;
    for (auto& f : fields) f = trim(std::move(f));
    table.header_ = fields;
    break;
  }
  if (table.header_.empty()) throw InvalidData("line 1: missing header row");
  for (std::size_t i = 0; i < table.header_.size(); ++i) {
    if (std::count(table.header_.begin(), table.header_.end(), table.header_[i]) > 1) {
      throw InvalidData(at_line(line) + "duplicate column name '" + table.header_[i] + "'");
    }
  }

  while (read_record(in, delimiter, fields, line)) {
    if (blank(fields)) continue;
    if (fields.size() != table.header_.size()) {
      throw InvalidData(at_line(line) + "expected " + std::to_string(table.header_.size()) +
                        " fields, found " + std::to_string(fields.size()));
    }
    table.rows_.push_back(fields);
    table.lines_.push_back(line);
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path.string() + "'");
  return parse_csv(in, delimiter);
}

std::size_t CsvTable::column_index(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw InvalidData("line 1: no column named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

std::vector<std::string> CsvTable::text_column(std::string_view name) const {
  const std::size_t c = column_index(name);
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(trim(r[c]));
  return out;
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const std::string cell = trim(rows_[i][c]);
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw InvalidData(at_line(lines_[i]) + "column '" + std::string(name) + "': '" + cell +
                        "' is not a finite number");
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace latentrank
