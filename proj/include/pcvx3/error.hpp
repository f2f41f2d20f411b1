#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pcvx3 {

enum class ErrorKind {
  InvalidArgument,
  NonzeroConstantSubstitution,
  NonpositiveDelta,
  HypothesisViolated,
  NonRealInput,
  TDependentInput,
  HypothesisViolation,
  NotPseudoconvexWitness,
  NonPseudoconvexInput,
  TruncationUnsafe,
  RankDeficient,
  InclusionFailed,
  DegenerateGram,
  InsufficientData,
  ContainmentViolated,
  ParseError,
  IoError,
  InternalInvariant,
};

const char* error_kind_name(ErrorKind kind);

// Single exception type for the library; `kind()` carries the
// machine-readable classification used by the CLI exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace pcvx3
