#pragma once

#include <stdexcept>
#include <string>

namespace towerplex {

enum class ErrorCode {
  PointOutsideDomain,
  DomainMismatch,
  PieceBudgetExceeded,
  SetOutsideDomain,
  ResidualTooLarge,
  SpecExhausted,
  TransferTooLarge,
  ContainmentInfeasible,
  DepthInsufficient,
  ZeroNormalizer,
  UniverseExhausted,
  SearchCapExceeded,
  MissingSnapshot,
  CorruptSnapshot,
  ConfigInvalid,
  InternalInvariant,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, int stage = -1)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code),
        stage_(stage),
        detail_(std::move(detail)) {}

  ErrorCode code() const { return code_; }
  int stage() const { return stage_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  int stage_;
  std::string detail_;
};

}  // namespace towerplex
