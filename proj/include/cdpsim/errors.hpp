#pragma once

#include <stdexcept>
#include <string>

namespace cdpsim {

// Stable error codes; scenario reports record these verbatim.
enum class ErrorCode {
  kShutdown,
  kFrozen,
  kAlreadyShutdown,
  kNotShutdown,
  kUnknownCollateral,
  kUnknownSymbol,
  kDuplicateCollateral,
  kUnknownVault,
  kUnknownAuction,
  kUnknownProposal,
  kNotOwner,
  kVaultNotOpen,
  kInsufficientBalance,
  kInsufficientCollateral,
  kUndercollateralized,
  kCeiling,
  kOverpayment,
  kNonzeroDebt,
  kNonzeroCollateral,
  kTimeRegression,
  kVaultSafe,
  kAlreadyInLiquidation,
  kAuctionNotActive,
  kKeeperInsufficient,
  kPriceInvalid,
  kOutOfBounds,
  kProposalNotVoting,
  kProposalExpired,
  kVotingOpen,
  kAlreadyTallied,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::kShutdown: return "SHUTDOWN";
    case ErrorCode::kFrozen: return "FROZEN";
    case ErrorCode::kAlreadyShutdown: return "ALREADY_SHUTDOWN";
    case ErrorCode::kNotShutdown: return "NOT_SHUTDOWN";
    case ErrorCode::kUnknownCollateral: return "UNKNOWN_COLLATERAL";
    case ErrorCode::kUnknownSymbol: return "UNKNOWN_SYMBOL";
    case ErrorCode::kDuplicateCollateral: return "DUPLICATE_COLLATERAL";
    case ErrorCode::kUnknownVault: return "UNKNOWN_VAULT";
    case ErrorCode::kUnknownAuction: return "UNKNOWN_AUCTION";
    case ErrorCode::kUnknownProposal: return "UNKNOWN_PROPOSAL";
    case ErrorCode::kNotOwner: return "NOT_OWNER";
    case ErrorCode::kVaultNotOpen: return "VAULT_NOT_OPEN";
    case ErrorCode::kInsufficientBalance: return "INSUFFICIENT_BALANCE";
    case ErrorCode::kInsufficientCollateral: return "INSUFFICIENT_COLLATERAL";
    case ErrorCode::kUndercollateralized: return "UNDERCOLLATERALIZED";
    case ErrorCode::kCeiling: return "CEILING";
    case ErrorCode::kOverpayment: return "OVERPAYMENT";
    case ErrorCode::kNonzeroDebt: return "NONZERO_DEBT";
    case ErrorCode::kNonzeroCollateral: return "NONZERO_COLLATERAL";
    case ErrorCode::kTimeRegression: return "TIME_REGRESSION";
    case ErrorCode::kVaultSafe: return "VAULT_SAFE";
    case ErrorCode::kAlreadyInLiquidation: return "ALREADY_IN_LIQUIDATION";
    case ErrorCode::kAuctionNotActive: return "AUCTION_NOT_ACTIVE";
    case ErrorCode::kKeeperInsufficient: return "KEEPER_INSUFFICIENT";
    case ErrorCode::kPriceInvalid: return "PRICE_INVALID";
    case ErrorCode::kOutOfBounds: return "OUT_OF_BOUNDS";
    case ErrorCode::kProposalNotVoting: return "PROPOSAL_NOT_VOTING";
    case ErrorCode::kProposalExpired: return "PROPOSAL_EXPIRED";
    case ErrorCode::kVotingOpen: return "VOTING_OPEN";
    case ErrorCode::kAlreadyTallied: return "ALREADY_TALLIED";
  }
  return "UNKNOWN";
}

class EngineError : public std::runtime_error {
 public:
  EngineError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Engine-internal consistency violation. Never expected; aborts a run.
class AuditError : public std::logic_error {
 public:
  explicit AuditError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cdpsim
