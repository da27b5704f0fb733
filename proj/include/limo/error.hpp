#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace limo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument, shape mismatch, or violated precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class DataError : public Error {
 public:
  DataError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  explicit DataError(const std::string& what) : DataError(0, what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// A measure has no eligible row or column to average over.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Training cannot start (e.g. no sampleable pair for an active margin term).
class SetupError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced during optimisation.
class NumericError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ArgumentError(message);
}

}  // namespace detail
}  // namespace limo
