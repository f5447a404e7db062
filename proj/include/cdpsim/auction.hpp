// In-flight liquidation auctions and their settlement records.
//
// Collateral auctions are a single-round fixed-price sale to the keeper
// pool at oracle price times (1 - discount). Debt auctions mint MKR sold
// to the keeper pool for Dai that is burned against recorded bad debt.
#pragma once

#include <cstdint>
#include <string>

#include "cdpsim/fixed_point.hpp"
#include "cdpsim/vault.hpp"

namespace cdpsim {

using AuctionId = uint64_t;

enum class AuctionState { kActive, kSettled };

struct Auction {
  AuctionId id = 0;
  VaultId vault_id = 0;
  Account vault_owner;
  Symbol collateral_id;
  Wad lot{};          // escrowed collateral units
  Wad tab{};          // Dai to raise: debt + penalty at liquidation time
  Wad tab_debt{};     // debt portion of the tab
  Wad principal{};    // unrepaid generated Dai moved in from the vault
  AuctionState state = AuctionState::kActive;
};

struct SettlementRecord {
  AuctionId auction_id = 0;
  VaultId vault_id = 0;
  Symbol collateral_id;
  Wad lot{};
  Wad tab{};
  Wad units_sold{};
  Wad proceeds{};      // Dai paid by the keeper pool, capped at tab
  Wad refund{};        // collateral units returned to the vault owner
  Wad bad_debt{};      // tab - proceeds
};

struct DebtAuctionRecord {
  Wad covered_by_surplus{};
  Wad covered_by_keeper{};
  Wad mkr_minted{};
  Wad remaining_bad_debt{};
};

}  // namespace cdpsim
