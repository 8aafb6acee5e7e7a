#pragma once

#include <stdexcept>
#include <string>

namespace derham {

// Base of every error thrown by the library. The CLI maps these to exit
// code 2 with a single-line message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested size (table level, depth, ...) exceeds a hard limit.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Floating-point over/underflow in an unnormalized matrix product.
class NumericRangeError : public Error {
 public:
  using Error::Error;
};

// Estimated work exceeds the configured budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Malformed textual input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace derham
