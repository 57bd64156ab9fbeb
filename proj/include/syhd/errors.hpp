#pragma once

#include <stdexcept>
#include <string>

namespace syhd {

// Malformed input files (datasets, configs, model files). Carries a line
// number when one is known; line 0 means "not line-oriented".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Non-finite values or divergence inside numeric code.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures: missing files, short reads, unwritable paths.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace syhd
