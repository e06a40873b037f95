#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plstab {

enum class ErrorKind {
  EmptyInput,
  UnsortedKnots,
  LengthMismatch,
  NonfiniteValue,
  ConcavityViolated,
  InfiniteMass,
  NotNormalized,
  QuantileOutOfRange,
  NonpositiveScale,
  NonpositiveDerivative,
  InvalidArgument,
  ToleranceNotReached,
  ZeroMass,
  DominationViolated,
  DegenerateAtZ,
  HypothesisNotMet,
  EpsilonOutOfRange,
  NonintegrableTestFunction,
  EpsOutOfRange,
  BaseNotEven,
  UnknownSuite,
  ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure in the library is reported as an Error carrying its kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace plstab
