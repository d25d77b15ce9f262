#pragma once

#include <stdexcept>
#include <string>

namespace levnano {

// Error families map one-to-one onto CLI exit codes (see tools/levnano.cpp).

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UntrappedAxis : public NumericalFailure {
 public:
  UntrappedAxis(char axis, const std::string& what)
      : NumericalFailure(what), axis_(axis) {}
  char axis() const noexcept { return axis_; }

 private:
  char axis_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace levnano
