#pragma once

#include <stdexcept>
#include <string>

namespace dks {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or infeasible parameter combinations.  The CLI maps
// these (and subclasses) to exit code 2.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class IndexError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class DomainError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Enumeration guard tripped (input too large for an exact oracle).
class SizeError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class ParseError : public ParameterError {
 public:
  ParseError(const std::string& msg, std::string field = "", long line = -1)
      : ParameterError(format(msg, field, line)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  long line() const { return line_; }

 private:
  static std::string format(const std::string& msg, const std::string& field, long line) {
    std::string out = msg;
    if (!field.empty()) out += " [field: " + field + "]";
    if (line >= 0) out += " [line: " + std::to_string(line) + "]";
    return out;
  }

  std::string field_;
  long line_;
};

class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

// A randomized construction ran out of attempts; carries the best
// certificate value seen (meaning depends on the construction).
class RetryExhaustedError : public Error {
 public:
  RetryExhaustedError(const std::string& msg, double best_value)
      : Error(msg + " (best certificate value seen: " + std::to_string(best_value) + ")"),
        best_value_(best_value) {}

  double best_value() const { return best_value_; }

 private:
  double best_value_;
};

}  // namespace dks
