#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repgp {

enum class ErrorKind {
  DimensionMismatch,
  SingularUpdate,
  InvalidCavity,
  InvalidPower,
  NonPositiveVariance,
  NonSPDKernel,
  SingularKernel,
  DegenerateData,
  LineSearchFailure,
  NonFiniteObjective,
  DegenerateWeights,
  ParseError,
  MissingColumn,
  EmptyDataset,
  PlanExceedsData,
  SchemaMismatch,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the sweep
// loops, the harness, the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace repgp
