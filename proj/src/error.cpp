#include "pcvx3/error.hpp"

namespace pcvx3 {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonzeroConstantSubstitution: return "NonzeroConstantSubstitution";
    case ErrorKind::NonpositiveDelta: return "NonpositiveDelta";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NonRealInput: return "NonRealInput";
    case ErrorKind::TDependentInput: return "TDependentInput";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::NotPseudoconvexWitness: return "NotPseudoconvexWitness";
    case ErrorKind::NonPseudoconvexInput: return "NonPseudoconvexInput";
    case ErrorKind::TruncationUnsafe: return "TruncationUnsafe";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InclusionFailed: return "InclusionFailed";
    case ErrorKind::DegenerateGram: return "DegenerateGram";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ContainmentViolated: return "ContainmentViolated";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InternalInvariant: return "InternalInvariant";
  }
  return "Unknown";
}

}  // namespace pcvx3
