#include "tergm/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tergm/errors.hpp"

namespace tergm {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  CsvTable t;
  t.file = path;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      t.header = split_line(line);
      continue;
    }
    if (line.empty()) continue;  // tolerate a trailing blank line
    auto fields = split_line(line);
    if (fields.size() != t.header.size())
      throw ParseError(path, lineno,
                       "expected " + std::to_string(t.header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw ParseError(path, 1, "missing header line");
  return t;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : n_cols_(header.size()) {
  add_row(header);
}

void CsvWriter::add_row(const std::vector<std::string>& fields) {
  if (fields.size() != n_cols_)
    throw std::invalid_argument("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string& f = fields[i];
    if (f.find_first_of(",\n\r") != std::string::npos)
      throw std::invalid_argument("csv field contains separator: " + f);
    if (i) buf_.push_back(',');
    buf_ += f;
  }
  buf_.push_back('\n');
}

std::optional<long> parse_int_field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::optional<double> parse_double_field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::optional<bool> parse_bool_field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "0" || s == "false") return false;
  if (s == "1" || s == "true") return true;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

}  // namespace tergm
