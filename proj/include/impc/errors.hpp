#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace impc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or truncated input data; carries the byte offset (or row) where
// parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t byte_offset)
      : Error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_ = 0;
};

// Well-formed input that violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the operation's documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Index, station, or timestamp outside the covered span.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Output would exceed a configured resource budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures, always with the path in the message.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace impc
