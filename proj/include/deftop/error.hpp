#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deftop {

/// Base class of every exception thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text that does not follow a grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A precondition of an operation does not hold for its arguments
/// (point outside X, degenerate interval, unvalidated spec, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace deftop
