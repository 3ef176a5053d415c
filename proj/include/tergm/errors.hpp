#pragma once

#include <stdexcept>
#include <string>

namespace tergm {

// Error classes map 1:1 onto CLI exit codes; see runner.cpp.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, long line, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg),
        file_(file),
        line_(line) {}
  const std::string& file() const { return file_; }
  long line() const { return line_; }

 private:
  std::string file_;
  long line_;
};

// Input parses but violates a data invariant (duplicate dyad, off-roster
// state, out-of-range value, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Optimizer failures: separation, singular Hessian, non-convergence.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Run configuration violates the schema. `field` is a JSON-pointer-ish
// path to the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : Error(field + ": " + msg), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace tergm
