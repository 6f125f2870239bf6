#pragma once

#include <stdexcept>
#include <string>

namespace ptspectra {

enum class ErrorKind {
  InvalidBasis,
  IndexOutOfRange,
  InvalidInput,
  Bracket,
  Binding,
  Lexical,
  Syntax,
  UnknownSymbol,
  DivisionByOperator,
  NonIntegerExponent,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported through this type; `kind()` lets callers
// (CLI exit codes, python bindings) dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ptspectra
