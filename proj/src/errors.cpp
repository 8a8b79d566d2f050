#include "towerplex/errors.hpp"

namespace towerplex {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::PieceBudgetExceeded: return "PieceBudgetExceeded";
    case ErrorCode::SetOutsideDomain: return "SetOutsideDomain";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::SpecExhausted: return "SpecExhausted";
    case ErrorCode::TransferTooLarge: return "TransferTooLarge";
    case ErrorCode::ContainmentInfeasible: return "ContainmentInfeasible";
    case ErrorCode::DepthInsufficient: return "DepthInsufficient";
    case ErrorCode::ZeroNormalizer: return "ZeroNormalizer";
    case ErrorCode::UniverseExhausted: return "UniverseExhausted";
    case ErrorCode::SearchCapExceeded: return "SearchCapExceeded";
    case ErrorCode::MissingSnapshot: return "MissingSnapshot";
    case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InternalInvariant: return "InternalInvariant";
  }
  return "Unknown";
}

}  // namespace towerplex
