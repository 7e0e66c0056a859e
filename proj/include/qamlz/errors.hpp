#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qamlz {

// Base of every error the library throws on a broken contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an out-of-range or inconsistent argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input data violates a domain invariant (labels, finiteness, class balance).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed text input; line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Request exceeds what a backend can do (e.g. exhaustive search on too many spins).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qamlz
