#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace multsys {

enum class ErrorCode {
  // stepfn
  NonAscendingBreakpoints,
  LengthMismatch,
  EmptyDomain,
  DomainMismatch,
  OutOfDomain,
  NonPositiveFactor,
  CapacityExceeded,
  // moments
  CapTooLarge,
  BadSubset,
  // reduction
  BadArity,
  NotStepInput,
  UnsortedSamples,
  ValueOutOfBounds,
  NotTwoValued,
  NonZeroMean,
  // inequalities
  OutOfRange,
  NotMultiplicative,
  BoundViolation,
  TooLarge,
  NonPositiveLambda,
  BadBounds,
  BadExponent,
  // lacunary
  NotLacunary,
  TauTooSmall,
  LambdaTooSmall,
  // subseq
  NotOrthogonal,
  EmptyCandidates,
  WindowExhausted,
  // rubinshtein
  WrongDomain,
  // cli
  ParseError,
  UnknownBuiltin,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace multsys
