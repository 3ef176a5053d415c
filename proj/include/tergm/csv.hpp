#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tergm {

// Minimal CSV layer for the panel file formats: comma separated, first line
// is the header, empty field means missing.  Quoting is not supported; a
// field containing a comma or newline is rejected on write.

struct CsvTable {
  std::string file;  // for error messages
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line number of each row in the source file.
  std::vector<long> line_numbers;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& fields);
  std::string str() const { return buf_; }

 private:
  std::size_t n_cols_;
  std::string buf_;
};

// Field parsers shared by the readers.  All throw ParseError via the caller
// with the file/line context, so they just return optional / throw
// std::invalid_argument here.
std::optional<long> parse_int_field(const std::string& s);
std::optional<double> parse_double_field(const std::string& s);
std::optional<bool> parse_bool_field(const std::string& s);

}  // namespace tergm
