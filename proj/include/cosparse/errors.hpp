#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cosparse {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not conform.
class ShapeError : public Error {
  public:
    using Error::Error;
};

// A requested size or configuration is outside the supported domain.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// Cholesky factorization hit a non-positive pivot.
class SingularMatrixError : public Error {
  public:
    SingularMatrixError(std::size_t pivot, double value)
        : Error("matrix is not positive definite: pivot " + std::to_string(pivot) +
                " has value " + std::to_string(value)),
          pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

  private:
    std::size_t pivot_;
};

// Malformed input file. line() is 1-based; 0 means "whole file".
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

// A metric is undefined for the given input (e.g. PRD of a zero reference).
class MetricError : public Error {
  public:
    using Error::Error;
};

}  // namespace cosparse
