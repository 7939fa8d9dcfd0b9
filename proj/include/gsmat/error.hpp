#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsmat {

// Base class of every error the engine raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed N-Triples or query text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Syntactically valid query using a construct the engine does not evaluate
// (variable predicates, OPTIONAL, ...).
class UnsupportedFeature : public ParseError {
 public:
  using ParseError::ParseError;
};

// Id or predicate lookup that falls outside a dictionary or store.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Broken caller contract (unsorted input to an index builder, empty bound list, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A join would exceed the configured row budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

enum class StoreErrorKind { io, bad_magic, version_mismatch, truncated, corrupt };

class StoreError : public Error {
 public:
  StoreError(StoreErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  StoreErrorKind kind() const { return kind_; }

 private:
  StoreErrorKind kind_;
};

}  // namespace gsmat
