#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stabsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

// Parse failure in one of the text formats. `line` is 1-based, 0 when the
// problem is not tied to a single line (e.g. disconnected graph).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RuleNotEnabled : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace stabsim
