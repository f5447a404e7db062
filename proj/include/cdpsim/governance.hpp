// MKR-weighted governance: single yes/no proposals over protocol
// parameters, tallied against total MKR supply at a fixed deadline.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "cdpsim/collateral.hpp"
#include "cdpsim/vault.hpp"

namespace cdpsim {

using ProposalId = uint64_t;

enum class ProposalParam {
  kLiquidationRatio,
  kStabilityRate,     // proposed value is an annual rate fraction
  kDsrRate,           // annual rate fraction
  kDebtCeiling,
  kLiquidationPenalty,
  kAddCollateralType,
  kTriggerShutdown,
};

inline const char* proposal_param_name(ProposalParam p) {
  switch (p) {
    case ProposalParam::kLiquidationRatio: return "liquidation_ratio";
    case ProposalParam::kStabilityRate: return "stability_rate";
    case ProposalParam::kDsrRate: return "dsr_rate";
    case ProposalParam::kDebtCeiling: return "debt_ceiling";
    case ProposalParam::kLiquidationPenalty: return "liquidation_penalty";
    case ProposalParam::kAddCollateralType: return "add_collateral_type";
    case ProposalParam::kTriggerShutdown: return "trigger_shutdown";
  }
  return "?";
}

enum class ProposalState { kVoting, kPassed, kFailed, kExecuted };

inline const char* proposal_state_name(ProposalState s) {
  switch (s) {
    case ProposalState::kVoting: return "VOTING";
    case ProposalState::kPassed: return "PASSED";
    case ProposalState::kFailed: return "FAILED";
    case ProposalState::kExecuted: return "EXECUTED";
  }
  return "?";
}

// Parameters for an add_collateral_type proposal.
struct NewCollateralParams {
  Symbol id;
  Wad liquidation_ratio{};
  Wad stability_fee_annual{};
  std::optional<Wad> debt_ceiling;
  Wad liquidation_penalty{};
};

struct Proposal {
  ProposalId id = 0;
  ProposalParam param = ProposalParam::kTriggerShutdown;
  Symbol collateral_id;                       // for per-collateral parameters
  Wad value{};                                // scalar target value
  std::optional<Wad> ceiling_value;           // for debt_ceiling (nullopt = unlimited)
  std::optional<NewCollateralParams> new_collateral;
  Seconds voting_deadline = 0;
  std::map<Account, Wad> tally;               // supporter -> MKR weight at vote time
  ProposalState state = ProposalState::kVoting;

  Wad yes_weight() const {
    Wad sum{};
    for (const auto& [account, weight] : tally) sum += weight;
    return sum;
  }
};

}  // namespace cdpsim
