#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultragap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a scalar argument does not hold (n < 2, trials = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix, dendrogram or tree does not have the required shape.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

/// The problem is larger than the exact enumeration supports.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap or produced an inconsistent state.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The metric does not have p-negative type. Carries a simplex with negative gap.
class NegativeTypeFailure : public Error {
 public:
  NegativeTypeFailure(double p, std::vector<double> omega, double gamma)
      : Error("metric lacks " + std::to_string(p) + "-negative type: simplex gap " +
              std::to_string(gamma) + " < 0"),
        p_(p),
        omega_(std::move(omega)),
        gamma_(gamma) {}

  double p() const noexcept { return p_; }
  const std::vector<double>& omega() const noexcept { return omega_; }
  double gamma() const noexcept { return gamma_; }

 private:
  double p_;
  std::vector<double> omega_;
  double gamma_;
};

}  // namespace ultragap
