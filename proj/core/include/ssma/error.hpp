// error.hpp - exception hierarchy shared by every ssma module.
//
// Each error carries a category that the command-line tool maps onto its
// exit status (usage = 2, data = 3, numerical = 4).

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ssma {

enum class ErrorKind {
  Usage,      // bad parameter or flag value
  Data,       // malformed or inconsistent input data
  Numerical,  // factorization or solver failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Invalid parameter value (k too large, fraction out of range, ...).
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::Usage, what) {}
};

/// Input violates a structural invariant (shapes, labels, file grammar).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Data, what) {}
};

/// Parse failure with a 1-based line number (0 when not line-specific).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(ErrorKind::Data,
              source + (line ? ":" + std::to_string(line) : std::string()) +
                  ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The regularized metric matrix never became positive definite.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::vector<double> ladder)
      : Error(ErrorKind::Numerical, what), ladder_(std::move(ladder)) {}

  /// The absolute ridge values that were attempted, in order.
  const std::vector<double>& attempted_ridges() const noexcept {
    return ladder_;
  }

 private:
  std::vector<double> ladder_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::Numerical, what) {}
};

}  // namespace ssma
