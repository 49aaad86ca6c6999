#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sonc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Input violates a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed to converge or to meet its residual bound.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class InvalidCircuit : public Error {
 public:
  using Error::Error;
};

class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace sonc
