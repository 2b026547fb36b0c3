#include "repgp/error.hpp"

namespace repgp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularUpdate: return "SingularUpdate";
    case ErrorKind::InvalidCavity: return "InvalidCavity";
    case ErrorKind::InvalidPower: return "InvalidPower";
    case ErrorKind::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorKind::NonSPDKernel: return "NonSPDKernel";
    case ErrorKind::SingularKernel: return "SingularKernel";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::LineSearchFailure: return "LineSearchFailure";
    case ErrorKind::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::PlanExceedsData: return "PlanExceedsData";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace repgp
