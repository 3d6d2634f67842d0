#include "multsys/error.hpp"

namespace multsys {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonAscendingBreakpoints: return "NonAscendingBreakpoints";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::CapTooLarge: return "CapTooLarge";
    case ErrorCode::BadSubset: return "BadSubset";
    case ErrorCode::BadArity: return "BadArity";
    case ErrorCode::NotStepInput: return "NotStepInput";
    case ErrorCode::UnsortedSamples: return "UnsortedSamples";
    case ErrorCode::ValueOutOfBounds: return "ValueOutOfBounds";
    case ErrorCode::NotTwoValued: return "NotTwoValued";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotMultiplicative: return "NotMultiplicative";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::BadBounds: return "BadBounds";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::NotLacunary: return "NotLacunary";
    case ErrorCode::TauTooSmall: return "TauTooSmall";
    case ErrorCode::LambdaTooSmall: return "LambdaTooSmall";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::WindowExhausted: return "WindowExhausted";
    case ErrorCode::WrongDomain: return "WrongDomain";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
  }
  return "Unknown";
}

}  // namespace multsys
