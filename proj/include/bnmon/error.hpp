#pragma once

#include <stdexcept>
#include <string>

namespace bnmon {

// Base error for everything the library reports as a failed precondition or
// malformed input. The CLI maps every Error to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when propagation loses all probability mass to floating-point
// underflow. Cannot happen for strictly positive models of modest size.
class UnderflowError : public Error {
 public:
  UnderflowError() : Error("evidence probability underflow") {}
};

}  // namespace bnmon
