#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsslab {

// Base class for all failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Signature violations: conflicting declaration, overlap in a sum, arity mismatch.
class SignatureError : public Error {
 public:
  using Error::Error;
};

class SignatureOverlap : public SignatureError {
 public:
  using SignatureError::SignatureError;
};

// A rule variable cannot be instantiated by matching and the ground universe
// needed to enumerate it is infinite.
class UnboundRuleVariable : public Error {
 public:
  using Error::Error;
};

// The TSS has negative premises and no stratification was found.
class NonStratified : public Error {
 public:
  using Error::Error;
};

// Proof search exceeded the configured depth or width budget.
class SearchBudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A graph operation was asked about a graph outside the family.
class GNotInFamily : public Error {
 public:
  using Error::Error;
};

// embed() requires a transition-closed family.
class NotTransitionClosed : public Error {
 public:
  using Error::Error;
};

// A valuation was queried for a variable it does not map.
class UnmappedFreeVariable : public Error {
 public:
  using Error::Error;
};

// Adequacy probing found a family enlargement that changes the interpretation.
class NonAdequate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string msg, std::size_t line, std::size_t col)
      : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")"),
        line_(line),
        col_(col) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

}  // namespace tsslab
