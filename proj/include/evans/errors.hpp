#pragma once

#include <stdexcept>
#include <string>

namespace evans {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameters out of range, inadmissible spectral parameter,
/// malformed profile files.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DomainError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DomainError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A computation ran but could not deliver a trustworthy number
/// (singular stage system, quadrature or series non-convergence, overflow).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace evans
