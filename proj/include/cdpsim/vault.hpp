// One owner's collateralized debt position in a single collateral type.
#pragma once

#include <cstdint>
#include <string>

#include "cdpsim/collateral.hpp"
#include "cdpsim/fixed_point.hpp"

namespace cdpsim {

using Account = std::string;
using VaultId = uint64_t;

enum class VaultState { kOpen, kInLiquidation, kClosed };

inline const char* vault_state_name(VaultState s) {
  switch (s) {
    case VaultState::kOpen: return "OPEN";
    case VaultState::kInLiquidation: return "IN_LIQUIDATION";
    case VaultState::kClosed: return "CLOSED";
  }
  return "?";
}

struct Vault {
  VaultId id = 0;
  Account owner;
  Symbol collateral_id;
  Wad locked_collateral{};
  Wad normalized_debt{};   // debt / fee_accumulator at generation time
  Wad principal{};         // generated Dai not yet repaid; excludes accrued fees
  VaultState state = VaultState::kOpen;

  // Dai owed right now, fees included.
  Wad current_debt(const CollateralType& ct) const {
    return wad_ray_mul(normalized_debt, ct.fee_accumulator);
  }
};

}  // namespace cdpsim
