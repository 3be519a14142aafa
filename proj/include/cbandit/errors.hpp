#pragma once

#include <stdexcept>
#include <string>

namespace cbandit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid graph or model: cycles, bad flags, malformed CPTs.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A hidden node has parents or more than two children.
class SemiMarkovViolation : public StructuralError {
 public:
  using StructuralError::StructuralError;
};

class EnumerationInfeasible : public Error {
 public:
  using Error::Error;
};

class PositivityViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Bad parameters handed to a generator, algorithm or plan.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace cbandit
