#pragma once

#include <stdexcept>
#include <string>

namespace quasifix {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual or JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Arguments that violate an operation's precondition (non-prime modulus,
/// rank mismatch, Q not exceeding the map degrees, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A field order or enumeration size above the configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A symbolic, word-length or iteration budget was exhausted.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace quasifix
