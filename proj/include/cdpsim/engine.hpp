// The protocol state machine: vault lifecycle, stability-fee accrual,
// liquidation auctions, Dai savings, MKR governance, emergency shutdown.
//
// Accounting scheme: when a fee accumulator advances, the incremental fee
// on every open vault is minted to the surplus buffer at that moment, so
// "every Dai is backed" stays an exact integer identity at all times:
//
//   sum(open vault debts) + sum(active auction debt) + uncovered system
//   debt == Dai supply - keeper funding
//
// Repayments burn the full amount (the fee share already sits in surplus
// from accrual). Rounding dust on generate/repay is settled against the
// surplus buffer so the identity never drifts by even one ulp. audit()
// re-derives every identity from scratch and throws on any mismatch.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdpsim/auction.hpp"
#include "cdpsim/collateral.hpp"
#include "cdpsim/config.hpp"
#include "cdpsim/errors.hpp"
#include "cdpsim/fixed_point.hpp"
#include "cdpsim/governance.hpp"
#include "cdpsim/price_feed.hpp"
#include "cdpsim/savings.hpp"
#include "cdpsim/snapshot.hpp"
#include "cdpsim/token_ledger.hpp"
#include "cdpsim/vault.hpp"

namespace cdpsim {

inline constexpr const char* kSurplusAccount = "system.surplus";
inline constexpr const char* kKeeperAccount = "system.keeper";
inline constexpr const char* kPotAccount = "system.pot";
inline constexpr const char* kMkrSymbol = "MKR";

// Every mint and burn, bucketed by cause. The audits recompute token
// supplies and the backing identity from these, so each ledger mutation
// must update its bucket in the same operation.
struct MintBurnCounters {
  Wad dai_minted_generate{};        // paid out to vault owners
  Wad dai_minted_surplus_income{};  // accrued fees plus rounding dust
  Wad dai_minted_dsr_interest{};    // pot interest (netted against surplus)
  Wad dai_minted_keeper_fund{};     // scenario funding of the keeper pool
  Wad dai_burned_repay{};
  Wad dai_burned_auction{};         // settlement proceeds retiring debt
  Wad dai_burned_debt_auction{};    // keeper Dai raised by minting MKR
  Wad dai_burned_surplus_absorb{};  // surplus consumed against system debt
  Wad dai_burned_redeem{};
  Wad mkr_minted_faucet{};
  Wad mkr_minted_voting_reward{};
  Wad mkr_minted_debt_auction{};
  Wad mkr_burned_buy_and_burn{};
  Wad sys_debt_created_settlement{};  // auction shortfall vs vault debt
  Wad sys_debt_created_dsr{};         // pot interest minted as system debt
  Wad sys_debt_covered_surplus{};
  Wad sys_debt_covered_keeper{};
  Wad bad_debt_reported{};    // sum of (tab - proceeds) across settlements
  Wad penalty_assessed{};     // tab - debt at liquidation start
  Wad penalty_collected{};    // proceeds beyond debt, routed to surplus
  std::map<Symbol, Wad> collateral_faucet;
};

struct VaultRatio {
  bool has_debt = false;
  Wad ratio{};  // saturated to U128_MAX when there is no debt
};

// The full repayment amount is burned; the split is informational, showing
// how much of it serviced accrued fees rather than principal.
struct RepayResult {
  Wad amount_burned{};
  Wad fee_portion{};
};

struct BuyBurnRecord {
  Wad dai_spent{};
  Wad mkr_burned{};
};

struct ProposalOutcome {
  ProposalId id = 0;
  Wad yes_weight{};
  Wad total_supply{};
  ProposalState state = ProposalState::kFailed;
  std::string execution_error;
};

struct RedeemRecord {
  Wad requested{};
  Wad redeemed{};    // Dai burned
  Wad remainder{};   // unredeemable part, left with the holder
  std::map<Symbol, Wad> delivered;
};

class Engine {
 public:
  explicit Engine(SimConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    for (const auto& cc : cfg_.collateral_types) {
      register_collateral_type(cc);
      if (cc.initial_price) feed_.set_price(cc.id, *cc.initial_price);
    }
    if (cfg_.mkr_initial_price) feed_.set_price(kMkrSymbol, *cfg_.mkr_initial_price);
    pot_.set_rate(annual_to_per_second(cfg_.dsr_annual));
  }

  // ---------------------------------------------------------------------
  // Time
  // ---------------------------------------------------------------------

  // Accrues every fee accumulator and the savings index up to `now`,
  // minting the incremental vault fees to surplus and the pot's grown
  // liability as system debt, then netting surplus against system debt.
  // Fee mints telescope and the indices are recomputed from their rate
  // epochs, so the state at a timestamp is identical whether the interval
  // was crossed in one accrual or many. After shutdown the clock still
  // advances (proposal deadlines) but all accumulators stay frozen, so no
  // new Dai can appear.
  void advance_time(Seconds now) {
    if (now < clock_) {
      throw EngineError(ErrorCode::kTimeRegression, "clock going backwards");
    }
    clock_ = now;
    if (shutdown_) return;

    std::map<Symbol, Ray> acc_before;
    for (auto& [id, ct] : collateral_) {
      acc_before[id] = ct.fee_accumulator;
      ct.accrue(now);
    }
    Wad fees{};
    for (const auto& [id, v] : vaults_) {
      if (v.state != VaultState::kOpen || v.normalized_debt.raw == 0) continue;
      const CollateralType& ct = collateral_.at(v.collateral_id);
      fees += wad_ray_mul(v.normalized_debt, ct.fee_accumulator) -
              wad_ray_mul(v.normalized_debt, acc_before.at(v.collateral_id));
    }
    if (fees.raw != 0) {
      dai_.mint(kSurplusAccount, fees);
      counters_.dai_minted_surplus_income += fees;
    }

    Wad interest = pot_.accrue(now, dai_.balance(kPotAccount));
    if (interest.raw != 0) {
      dai_.mint(kPotAccount, interest);
      counters_.dai_minted_dsr_interest += interest;
      counters_.sys_debt_created_dsr += interest;
      outstanding_system_debt_ += interest;
    }

    // Fee income services DSR debt immediately; only the net position
    // survives, which keeps the outcome independent of accrual cadence.
    Wad net = std::min(dai_.balance(kSurplusAccount), outstanding_system_debt_);
    if (net.raw != 0) {
      dai_.burn(kSurplusAccount, net);
      counters_.dai_burned_surplus_absorb += net;
      counters_.sys_debt_covered_surplus += net;
      outstanding_system_debt_ -= net;
    }
  }

  Seconds now() const { return clock_; }
  bool is_shutdown() const { return shutdown_; }
  Seconds shutdown_at() const { return shutdown_at_; }
  const std::string& shutdown_reason() const { return shutdown_reason_; }

  // ---------------------------------------------------------------------
  // Market state
  // ---------------------------------------------------------------------

  void set_price(const Symbol& symbol, Wad price) {
    if (symbol != kMkrSymbol && collateral_.find(symbol) == collateral_.end()) {
      throw EngineError(ErrorCode::kUnknownSymbol, "no such priced symbol: " + symbol);
    }
    feed_.set_price(symbol, price);
  }

  Wad price(const Symbol& symbol) const { return feed_.price(symbol); }
  const PriceFeed& feed() const { return feed_; }

  void faucet_collateral(const Account& account, const Symbol& collateral_id, Wad amount) {
    require_collateral(collateral_id);
    free_collateral_[account][collateral_id] += amount;
    counters_.collateral_faucet[collateral_id] += amount;
  }

  void faucet_mkr(const Account& account, Wad amount) {
    mkr_.mint(account, amount);
    counters_.mkr_minted_faucet += amount;
  }

  void fund_keeper_dai(Wad amount) {
    dai_.mint(kKeeperAccount, amount);
    counters_.dai_minted_keeper_fund += amount;
  }

  void fund_keeper_mkr(Wad amount) {
    mkr_.mint(kKeeperAccount, amount);
    counters_.mkr_minted_faucet += amount;
  }

  Wad free_collateral(const Account& account, const Symbol& collateral_id) const {
    auto ita = free_collateral_.find(account);
    if (ita == free_collateral_.end()) return Wad{};
    auto itc = ita->second.find(collateral_id);
    return itc == ita->second.end() ? Wad{} : itc->second;
  }

  const TokenLedger& dai() const { return dai_; }
  const TokenLedger& mkr() const { return mkr_; }

  const CollateralType& collateral(const Symbol& id) const {
    auto it = collateral_.find(id);
    if (it == collateral_.end()) {
      throw EngineError(ErrorCode::kUnknownCollateral, "no such collateral: " + id);
    }
    return it->second;
  }

  // USD value of all protocol-held collateral: vaults, live auction
  // escrow, and the post-shutdown redemption pool.
  Wad total_collateral_value() const {
    Wad total{};
    for (const auto& [id, v] : vaults_) {
      if (v.locked_collateral.raw != 0) {
        total += wad_mul(v.locked_collateral, feed_.price(v.collateral_id));
      }
    }
    for (const auto& [id, a] : auctions_) {
      if (a.state == AuctionState::kActive && a.lot.raw != 0) {
        total += wad_mul(a.lot, feed_.price(a.collateral_id));
      }
    }
    for (const auto& [cid, units] : redemption_pool_) {
      if (units.raw != 0) total += wad_mul(units, feed_.price(cid));
    }
    return total;
  }

  // TVL: collateral value plus Dai parked in the savings pot (deposits at
  // face value, Dai priced at one dollar).
  Wad protocol_tvl() const { return total_collateral_value() + dai_.balance(kPotAccount); }

  // ---------------------------------------------------------------------
  // Vault lifecycle
  // ---------------------------------------------------------------------

  VaultId open_vault(const Account& owner, const Symbol& collateral_id) {
    require_live("open_vault");
    require_collateral(collateral_id);
    VaultId id = next_vault_id_++;
    Vault v;
    v.id = id;
    v.owner = owner;
    v.collateral_id = collateral_id;
    vaults_[id] = std::move(v);
    return id;
  }

  void deposit_collateral(const Account& caller, VaultId vault_id, Wad amount) {
    Vault& v = open_vault_of(caller, vault_id);
    if (amount.raw == 0) return;
    Wad& free = free_collateral_[caller][v.collateral_id];
    if (free < amount) {
      throw EngineError(ErrorCode::kInsufficientCollateral,
                        "free balance " + to_string(free) + " < " + to_string(amount));
    }
    free -= amount;
    v.locked_collateral += amount;
  }

  // floor(locked value / liquidation ratio) - current debt, clamped at 0.
  Wad max_generatable(VaultId vault_id) const {
    const Vault& v = vault(vault_id);
    if (v.state != VaultState::kOpen) {
      throw EngineError(ErrorCode::kVaultNotOpen, "vault " + std::to_string(vault_id));
    }
    if (v.locked_collateral.raw == 0) return Wad{};
    const CollateralType& ct = collateral(v.collateral_id);
    Wad value = wad_mul(v.locked_collateral, feed_.price(v.collateral_id));
    Wad limit = wad_div(value, ct.liquidation_ratio);
    Wad debt = v.current_debt(ct);
    return limit > debt ? limit - debt : Wad{};
  }

  void generate_dai(const Account& caller, VaultId vault_id, Wad amount) {
    require_live("generate_dai");
    Vault& v = open_vault_of(caller, vault_id);
    if (amount.raw == 0) return;
    CollateralType& ct = collateral_.at(v.collateral_id);
    if (ct.debt_ceiling && ct.total_debt() + amount > *ct.debt_ceiling) {
      throw EngineError(ErrorCode::kCeiling, "debt ceiling for " + ct.id);
    }
    // Normalized debt rounds up so the vault owes at least what was
    // minted; the sub-ulp excess is minted to surplus to keep debt and
    // supply in lockstep.
    Wad delta_art = wad_ray_div_up(amount, ct.fee_accumulator);
    Wad new_art = v.normalized_debt + delta_art;
    Wad debt_before = v.current_debt(ct);
    Wad new_debt = wad_ray_mul(new_art, ct.fee_accumulator);
    Wad value = wad_mul(v.locked_collateral, feed_.price(v.collateral_id));
    if (!meets_ratio(value, new_debt, ct.liquidation_ratio)) {
      throw EngineError(ErrorCode::kUndercollateralized,
                        "generating " + to_string(amount) + " would breach the ratio");
    }
    v.normalized_debt = new_art;
    v.principal += amount;
    ct.total_normalized_debt += delta_art;
    dai_.mint(caller, amount);
    counters_.dai_minted_generate += amount;
    Wad dust = (new_debt - debt_before) - amount;
    if (dust.raw != 0) {
      dai_.mint(kSurplusAccount, dust);
      counters_.dai_minted_surplus_income += dust;
    }
  }

  // Burns the full amount against the vault's debt. The share of the
  // payment covering accrued fees (amount x (1 - principal/debt)) is
  // reported back; the corresponding fee Dai was already minted to
  // surplus when the accumulator advanced.
  RepayResult repay_dai(const Account& caller, VaultId vault_id, Wad amount) {
    Vault& v = open_vault_of(caller, vault_id);
    CollateralType& ct = collateral_.at(v.collateral_id);
    Wad debt = v.current_debt(ct);
    if (amount > debt) {
      throw EngineError(ErrorCode::kOverpayment,
                        "repaying " + to_string(amount) + " > debt " + to_string(debt));
    }
    if (amount.raw == 0) return {};
    if (dai_.balance(caller) < amount) {
      throw EngineError(ErrorCode::kInsufficientBalance, "Dai balance below repayment");
    }
    Wad fee_accrued = debt > v.principal ? debt - v.principal : Wad{};
    Wad fee_portion;
    if (amount == debt) {
      fee_portion = fee_accrued;
    } else {
      fee_portion =
          Wad{detail::mul_div_floor(amount.raw, fee_accrued.raw, debt.raw, "repay split")};
    }

    dai_.burn(caller, amount);
    counters_.dai_burned_repay += amount;

    Wad debt_after;
    if (amount == debt) {
      ct.total_normalized_debt -= v.normalized_debt;
      v.normalized_debt = Wad{};
      v.principal = Wad{};
      debt_after = Wad{};
    } else {
      // Floor keeps the retired debt <= amount; the shortfall dust is
      // minted to surplus so supply tracks debt exactly.
      Wad delta_art = std::min(wad_ray_div(amount, ct.fee_accumulator), v.normalized_debt);
      v.normalized_debt -= delta_art;
      ct.total_normalized_debt -= delta_art;
      v.principal -= std::min(v.principal, amount - fee_portion);
      debt_after = v.current_debt(ct);
    }
    Wad dust = amount - (debt - debt_after);
    if (dust.raw != 0) {
      dai_.mint(kSurplusAccount, dust);
      counters_.dai_minted_surplus_income += dust;
    }
    return {amount, fee_portion};
  }

  void withdraw_collateral(const Account& caller, VaultId vault_id, Wad amount) {
    Vault& v = open_vault_of(caller, vault_id);
    if (amount.raw == 0) return;
    if (amount > v.locked_collateral) {
      throw EngineError(ErrorCode::kInsufficientCollateral,
                        "locked " + to_string(v.locked_collateral) + " < " + to_string(amount));
    }
    const CollateralType& ct = collateral_.at(v.collateral_id);
    Wad new_locked = v.locked_collateral - amount;
    Wad debt = v.current_debt(ct);
    if (debt.raw != 0) {
      Wad value = wad_mul(new_locked, feed_.price(v.collateral_id));
      if (!meets_ratio(value, debt, ct.liquidation_ratio)) {
        throw EngineError(ErrorCode::kUndercollateralized,
                          "withdrawing " + to_string(amount) + " would breach the ratio");
      }
    }
    v.locked_collateral = new_locked;
    free_collateral_[caller][v.collateral_id] += amount;
  }

  void close_vault(const Account& caller, VaultId vault_id) {
    Vault& v = open_vault_of(caller, vault_id);
    if (v.normalized_debt.raw != 0) {
      throw EngineError(ErrorCode::kNonzeroDebt, "vault still owes Dai");
    }
    if (v.locked_collateral.raw != 0) {
      throw EngineError(ErrorCode::kNonzeroCollateral, "vault still holds collateral");
    }
    v.state = VaultState::kClosed;
  }

  VaultRatio collateralization_ratio(VaultId vault_id) const {
    const Vault& v = vault(vault_id);
    const CollateralType& ct = collateral(v.collateral_id);
    Wad debt = v.current_debt(ct);
    if (debt.raw == 0) return {false, Wad{U128_MAX}};
    Wad value = wad_mul(v.locked_collateral, feed_.price(v.collateral_id));
    return {true, wad_div(value, debt)};
  }

  Wad current_debt(VaultId vault_id) const {
    const Vault& v = vault(vault_id);
    return v.current_debt(collateral(v.collateral_id));
  }

  const Vault& vault(VaultId id) const {
    auto it = vaults_.find(id);
    if (it == vaults_.end()) {
      throw EngineError(ErrorCode::kUnknownVault, "no vault " + std::to_string(id));
    }
    return it->second;
  }

  const std::map<VaultId, Vault>& vaults() const { return vaults_; }

  // ---------------------------------------------------------------------
  // Liquidation
  // ---------------------------------------------------------------------

  // Open vaults with debt whose ratio is strictly below the liquidation
  // ratio (the boundary itself is safe), ascending id.
  std::vector<VaultId> scan_unsafe() const {
    std::vector<VaultId> out;
    for (const auto& [id, v] : vaults_) {
      if (v.state != VaultState::kOpen || v.normalized_debt.raw == 0) continue;
      const CollateralType& ct = collateral_.at(v.collateral_id);
      Wad debt = v.current_debt(ct);
      if (debt.raw == 0) continue;
      Wad value = wad_mul(v.locked_collateral, feed_.price(v.collateral_id));
      if (!meets_ratio(value, debt, ct.liquidation_ratio)) out.push_back(id);
    }
    return out;
  }

  AuctionId start_liquidation(VaultId vault_id) {
    require_live("start_liquidation");
    auto it = vaults_.find(vault_id);
    if (it == vaults_.end()) {
      throw EngineError(ErrorCode::kUnknownVault, "no vault " + std::to_string(vault_id));
    }
    Vault& v = it->second;
    if (v.state == VaultState::kInLiquidation) {
      throw EngineError(ErrorCode::kAlreadyInLiquidation, "vault " + std::to_string(vault_id));
    }
    if (v.state != VaultState::kOpen) {
      throw EngineError(ErrorCode::kVaultNotOpen, "vault " + std::to_string(vault_id));
    }
    CollateralType& ct = collateral_.at(v.collateral_id);
    Wad debt = v.current_debt(ct);
    Wad value = wad_mul(v.locked_collateral, feed_.price(v.collateral_id));
    if (debt.raw == 0 || meets_ratio(value, debt, ct.liquidation_ratio)) {
      throw EngineError(ErrorCode::kVaultSafe, "vault " + std::to_string(vault_id));
    }
    Auction a;
    a.id = next_auction_id_++;
    a.vault_id = vault_id;
    a.vault_owner = v.owner;
    a.collateral_id = v.collateral_id;
    a.lot = v.locked_collateral;
    a.tab_debt = debt;
    a.tab = debt + wad_mul(debt, ct.liquidation_penalty);
    a.principal = v.principal;
    counters_.penalty_assessed += a.tab - a.tab_debt;
    ct.total_normalized_debt -= v.normalized_debt;
    v.locked_collateral = Wad{};
    v.normalized_debt = Wad{};
    v.principal = Wad{};
    v.state = VaultState::kInLiquidation;
    AuctionId id = a.id;
    auctions_[id] = std::move(a);
    return id;
  }

  // Single-round sale to the keeper pool at oracle price x (1 - discount).
  // Proceeds retire the vault debt first; anything above that is realized
  // penalty income for the surplus buffer. The uncovered part of the
  // vault debt becomes system debt for the next debt auction, and the
  // reported bad debt additionally counts the uncollected penalty.
  SettlementRecord settle_collateral_auction(AuctionId auction_id) {
    require_live("settle_collateral_auction");
    auto it = auctions_.find(auction_id);
    if (it == auctions_.end()) {
      throw EngineError(ErrorCode::kUnknownAuction, "no auction " + std::to_string(auction_id));
    }
    Auction& a = it->second;
    if (a.state != AuctionState::kActive) {
      throw EngineError(ErrorCode::kAuctionNotActive, "auction " + std::to_string(auction_id));
    }
    Wad unit_price = wad_mul(feed_.price(a.collateral_id), WAD_ONE - cfg_.auction_discount);
    if (unit_price.raw == 0) {
      throw EngineError(ErrorCode::kPriceInvalid, "discounted price is zero");
    }
    Wad units_needed{detail::mul_div_ceil(a.tab.raw, WAD, unit_price.raw, "auction sizing")};
    Wad units_sold, cost;
    if (units_needed <= a.lot) {
      units_sold = units_needed;
      cost = a.tab;
    } else {
      units_sold = a.lot;
      cost = wad_mul(a.lot, unit_price);
    }
    if (dai_.balance(kKeeperAccount) < cost) {
      throw EngineError(ErrorCode::kKeeperInsufficient,
                        "keeper pool holds " + to_string(dai_.balance(kKeeperAccount)) +
                            " < " + to_string(cost));
    }

    Wad burn_part = std::min(cost, a.tab_debt);
    Wad penalty_part = cost - burn_part;
    dai_.burn(kKeeperAccount, burn_part);
    counters_.dai_burned_auction += burn_part;
    if (penalty_part.raw != 0) {
      dai_.transfer(kKeeperAccount, kSurplusAccount, penalty_part);
      counters_.penalty_collected += penalty_part;
    }

    free_collateral_[kKeeperAccount][a.collateral_id] += units_sold;
    Wad refund = a.lot - units_sold;
    if (refund.raw != 0) free_collateral_[a.vault_owner][a.collateral_id] += refund;

    Wad debt_shortfall = a.tab_debt - burn_part;
    if (debt_shortfall.raw != 0) {
      outstanding_system_debt_ += debt_shortfall;
      counters_.sys_debt_created_settlement += debt_shortfall;
    }
    Wad bad_debt = a.tab - cost;
    counters_.bad_debt_reported += bad_debt;

    a.state = AuctionState::kSettled;
    vaults_.at(a.vault_id).state = VaultState::kClosed;

    SettlementRecord rec{a.id,  a.vault_id, a.collateral_id, a.lot, a.tab,
                         units_sold, cost,  refund,          bad_debt};
    settlements_.push_back(rec);
    return rec;
  }

  // Covers outstanding system debt: the surplus buffer absorbs losses
  // first, then MKR is minted and sold to the keeper pool for Dai that is
  // burned against the rest.
  DebtAuctionRecord run_debt_auction() {
    require_live("run_debt_auction");
    DebtAuctionRecord rec;
    rec.remaining_bad_debt = outstanding_system_debt_;
    if (outstanding_system_debt_.raw == 0) return rec;

    Wad from_surplus = std::min(dai_.balance(kSurplusAccount), outstanding_system_debt_);
    Wad residual = outstanding_system_debt_ - from_surplus;
    if (residual.raw != 0 && !feed_.has_price(kMkrSymbol)) {
      throw EngineError(ErrorCode::kPriceInvalid, "no MKR price for debt auction");
    }
    if (from_surplus.raw != 0) {
      dai_.burn(kSurplusAccount, from_surplus);
      counters_.dai_burned_surplus_absorb += from_surplus;
      counters_.sys_debt_covered_surplus += from_surplus;
      outstanding_system_debt_ -= from_surplus;
      rec.covered_by_surplus = from_surplus;
    }
    if (residual.raw != 0) {
      Wad mkr_price = feed_.price(kMkrSymbol);
      Wad raise = std::min(residual, dai_.balance(kKeeperAccount));
      if (raise.raw != 0) {
        Wad mkr_minted = wad_div(raise, mkr_price);
        mkr_.mint(kKeeperAccount, mkr_minted);
        counters_.mkr_minted_debt_auction += mkr_minted;
        dai_.burn(kKeeperAccount, raise);
        counters_.dai_burned_debt_auction += raise;
        counters_.sys_debt_covered_keeper += raise;
        outstanding_system_debt_ -= raise;
        rec.covered_by_keeper = raise;
        rec.mkr_minted = mkr_minted;
      }
    }
    rec.remaining_bad_debt = outstanding_system_debt_;
    debt_auctions_.push_back(rec);
    return rec;
  }

  const Auction& auction(AuctionId id) const {
    auto it = auctions_.find(id);
    if (it == auctions_.end()) {
      throw EngineError(ErrorCode::kUnknownAuction, "no auction " + std::to_string(id));
    }
    return it->second;
  }

  const std::map<AuctionId, Auction>& auctions() const { return auctions_; }
  Wad outstanding_system_debt() const { return outstanding_system_debt_; }
  const std::vector<SettlementRecord>& settlements() const { return settlements_; }
  const std::vector<DebtAuctionRecord>& debt_auctions() const { return debt_auctions_; }

  // ---------------------------------------------------------------------
  // Dai savings
  // ---------------------------------------------------------------------

  void dsr_deposit(const Account& account, Wad amount) {
    if (amount.raw == 0) return;
    if (dai_.balance(account) < amount) {
      throw EngineError(ErrorCode::kInsufficientBalance, "Dai balance below deposit");
    }
    Wad delta = wad_ray_div(amount, pot_.chi);
    if (delta.raw == 0) return;  // sub-resolution dust
    dai_.transfer(account, kPotAccount, amount);
    pot_.normalized[account] += delta;
    pot_.total_normalized += delta;
  }

  void dsr_withdraw(const Account& account, Wad amount) {
    if (amount.raw == 0) return;
    Wad balance = pot_.balance(account);
    if (amount > balance) {
      throw EngineError(ErrorCode::kInsufficientBalance,
                        "savings balance " + to_string(balance) + " < " + to_string(amount));
    }
    auto it = pot_.normalized.find(account);
    // Normalized balance shrinks by at least amount/chi so the pot never
    // owes more than it holds.
    Wad delta = std::min(wad_ray_div_up(amount, pot_.chi), it->second);
    it->second -= delta;
    if (it->second.raw == 0) pot_.normalized.erase(it);
    pot_.total_normalized -= delta;
    dai_.transfer(kPotAccount, account, amount);
  }

  Wad dsr_balance(const Account& account) const { return pot_.balance(account); }
  const SavingsPot& pot() const { return pot_; }

  // ---------------------------------------------------------------------
  // Governance
  // ---------------------------------------------------------------------

  ProposalId propose(Proposal draft) {
    validate_proposal(draft);
    draft.id = next_proposal_id_++;
    draft.state = ProposalState::kVoting;
    draft.tally.clear();
    ProposalId id = draft.id;
    proposals_[id] = std::move(draft);
    return id;
  }

  // Voting is support-only: casting a vote backs the proposal with the
  // voter's MKR balance as of now, and revoting overwrites the weight.
  // The participation reward is minted after the weight is recorded.
  void vote(ProposalId proposal_id, const Account& account) {
    Proposal& p = proposal_mut(proposal_id);
    if (p.state != ProposalState::kVoting) {
      throw EngineError(ErrorCode::kProposalNotVoting, "proposal " + std::to_string(proposal_id));
    }
    if (clock_ >= p.voting_deadline) {
      throw EngineError(ErrorCode::kProposalExpired, "proposal " + std::to_string(proposal_id));
    }
    p.tally[account] = mkr_.balance(account);
    if (cfg_.voting_reward_mkr.raw != 0) {
      mkr_.mint(account, cfg_.voting_reward_mkr);
      counters_.mkr_minted_voting_reward += cfg_.voting_reward_mkr;
    }
  }

  // Passes iff yes-weight exceeds threshold x current MKR supply (strict,
  // exact integer compare). Passed proposals apply immediately.
  ProposalOutcome tally_and_execute(ProposalId proposal_id) {
    Proposal& p = proposal_mut(proposal_id);
    if (p.state != ProposalState::kVoting) {
      throw EngineError(ErrorCode::kAlreadyTallied, "proposal " + std::to_string(proposal_id));
    }
    if (clock_ < p.voting_deadline) {
      throw EngineError(ErrorCode::kVotingOpen, "deadline not reached");
    }
    ProposalOutcome out;
    out.id = p.id;
    out.yes_weight = p.yes_weight();
    out.total_supply = mkr_.total_supply();
    bool passed = u256(out.yes_weight.raw) * WAD >
                  u256(cfg_.approval_threshold.raw) * out.total_supply.raw;
    if (!passed) {
      p.state = ProposalState::kFailed;
    } else {
      p.state = ProposalState::kPassed;
      try {
        apply_proposal(p);
        p.state = ProposalState::kExecuted;
      } catch (const EngineError& e) {
        out.execution_error = e.what();
      }
    }
    out.state = p.state;
    proposal_outcomes_.push_back(out);
    return out;
  }

  // Converts surplus Dai above the buffer floor into MKR bought from the
  // keeper pool at the oracle price, then burns it.
  BuyBurnRecord buy_and_burn() {
    BuyBurnRecord rec;
    Wad surplus = dai_.balance(kSurplusAccount);
    if (surplus <= cfg_.surplus_buffer_floor) return rec;
    Wad excess = surplus - cfg_.surplus_buffer_floor;
    Wad mkr_price = feed_.price(kMkrSymbol);
    Wad wanted = wad_div(excess, mkr_price);
    Wad burn = std::min(wanted, mkr_.balance(kKeeperAccount));
    if (burn.raw == 0) return rec;
    Wad paid = wad_mul(burn, mkr_price);
    dai_.transfer(kSurplusAccount, kKeeperAccount, paid);
    mkr_.burn(kKeeperAccount, burn);
    counters_.mkr_burned_buy_and_burn += burn;
    rec.dai_spent = paid;
    rec.mkr_burned = burn;
    buy_burns_.push_back(rec);
    return rec;
  }

  const Proposal& proposal(ProposalId id) const {
    auto it = proposals_.find(id);
    if (it == proposals_.end()) {
      throw EngineError(ErrorCode::kUnknownProposal, "no proposal " + std::to_string(id));
    }
    return it->second;
  }

  const std::map<ProposalId, Proposal>& proposals() const { return proposals_; }
  const std::vector<ProposalOutcome>& proposal_outcomes() const { return proposal_outcomes_; }
  const std::vector<BuyBurnRecord>& buy_burns() const { return buy_burns_; }

  // ---------------------------------------------------------------------
  // Emergency shutdown
  // ---------------------------------------------------------------------

  // Irreversible: freezes reference prices and all accumulators, and
  // permanently rejects vault creation, Dai generation, and liquidations.
  void trigger_shutdown(const std::string& reason) {
    if (shutdown_) {
      throw EngineError(ErrorCode::kAlreadyShutdown, "engine already shut down");
    }
    feed_.freeze();
    shutdown_ = true;
    shutdown_at_ = clock_;
    shutdown_reason_ = reason;
  }

  // Returns locked collateral minus the debt-covering part (at frozen
  // prices) to the owner; the retained part joins the redemption pool and
  // the vault is wound down.
  Wad withdraw_excess_collateral(const Account& caller, VaultId vault_id) {
    if (!shutdown_) {
      throw EngineError(ErrorCode::kNotShutdown, "withdraw_excess requires shutdown");
    }
    auto it = vaults_.find(vault_id);
    if (it == vaults_.end()) {
      throw EngineError(ErrorCode::kUnknownVault, "no vault " + std::to_string(vault_id));
    }
    Vault& v = it->second;
    if (v.owner != caller) {
      throw EngineError(ErrorCode::kNotOwner,
                        caller + " does not own vault " + std::to_string(vault_id));
    }
    if (v.state != VaultState::kOpen) {
      throw EngineError(ErrorCode::kVaultNotOpen, "vault " + std::to_string(vault_id));
    }
    if (v.locked_collateral.raw == 0) {
      throw EngineError(ErrorCode::kInsufficientCollateral, "vault holds no collateral");
    }
    CollateralType& ct = collateral_.at(v.collateral_id);
    Wad debt = v.current_debt(ct);
    Wad retained = debt.raw == 0 ? Wad{} : wad_div(debt, feed_.price(v.collateral_id));
    retained = std::min(retained, v.locked_collateral);
    Wad excess = v.locked_collateral - retained;
    if (retained.raw != 0) redemption_pool_[v.collateral_id] += retained;
    if (excess.raw != 0) free_collateral_[caller][v.collateral_id] += excess;
    ct.total_normalized_debt -= v.normalized_debt;
    v.locked_collateral = Wad{};
    v.normalized_debt = Wad{};
    v.principal = Wad{};
    v.state = VaultState::kClosed;
    return excess;
  }

  // Burns Dai for a pro-rata basket of the retained collateral pool at
  // frozen prices. Short pools fill partially; the rest stays with the
  // holder and is reported back.
  RedeemRecord redeem_dai(const Account& holder, Wad amount) {
    if (!shutdown_) {
      throw EngineError(ErrorCode::kNotShutdown, "redeem requires shutdown");
    }
    RedeemRecord rec;
    rec.requested = amount;
    if (amount.raw == 0) return rec;
    if (dai_.balance(holder) < amount) {
      throw EngineError(ErrorCode::kInsufficientBalance, "Dai balance below redemption");
    }
    Wad pool_value{};
    std::map<Symbol, Wad> values;
    for (const auto& [cid, units] : redemption_pool_) {
      if (units.raw == 0) continue;
      Wad v = wad_mul(units, feed_.price(cid));
      values[cid] = v;
      pool_value += v;
    }
    Wad fill = std::min(amount, pool_value);
    rec.remainder = amount - fill;
    if (fill.raw == 0) return rec;
    for (const auto& [cid, value] : values) {
      Wad share{detail::mul_div_floor(fill.raw, value.raw, pool_value.raw, "redeem share")};
      Wad units = std::min(wad_div(share, feed_.price(cid)), redemption_pool_[cid]);
      if (units.raw == 0) continue;
      redemption_pool_[cid] -= units;
      free_collateral_[holder][cid] += units;
      rec.delivered[cid] = units;
    }
    dai_.burn(holder, fill);
    counters_.dai_burned_redeem += fill;
    rec.redeemed = fill;
    return rec;
  }

  const std::map<Symbol, Wad>& redemption_pool() const { return redemption_pool_; }

  // ---------------------------------------------------------------------
  // Audits: exact conservation identities, recomputed from scratch
  // ---------------------------------------------------------------------

  void audit() const {
    dai_.audit();
    mkr_.audit();
    audit_collateral_conservation();
    audit_dai_flows();
    audit_mkr_flows();
    audit_system_debt_ledger();
    audit_penalty_reconciliation();
    audit_normalized_totals();
    audit_pot_solvency();
    if (!shutdown_) audit_backing();
  }

  const MintBurnCounters& counters() const { return counters_; }

  // ---------------------------------------------------------------------
  // Snapshot
  // ---------------------------------------------------------------------

  nlohmann::json snapshot() const {
    nlohmann::json j;
    j["clock"] = clock_;
    if (shutdown_) {
      j["shutdown"] = {{"at", shutdown_at_}, {"reason", shutdown_reason_}};
    } else {
      j["shutdown"] = nullptr;
    }
    nlohmann::json cts = nlohmann::json::object();
    for (const auto& [id, ct] : collateral_) {
      nlohmann::json cj;
      cj["liquidation_ratio"] = to_string(ct.liquidation_ratio);
      cj["stability_rate"] = to_string(ct.stability_rate);
      cj["fee_accumulator"] = to_string(ct.fee_accumulator);
      cj["accumulator_updated_at"] = ct.accumulator_updated_at;
      cj["epoch_base"] = to_string(ct.epoch_base);
      cj["epoch_started_at"] = ct.epoch_started_at;
      cj["debt_ceiling"] = ct.debt_ceiling ? nlohmann::json(to_string(*ct.debt_ceiling))
                                           : nlohmann::json(nullptr);
      cj["liquidation_penalty"] = to_string(ct.liquidation_penalty);
      cj["total_normalized_debt"] = to_string(ct.total_normalized_debt);
      cts[id] = std::move(cj);
    }
    j["collateral_types"] = std::move(cts);

    nlohmann::json prices = nlohmann::json::object();
    for (const auto& [s, p] : feed_.live_prices()) prices[s] = to_string(p);
    j["prices"] = std::move(prices);
    if (feed_.frozen()) {
      nlohmann::json fp = nlohmann::json::object();
      for (const auto& [s, p] : feed_.frozen_prices()) fp[s] = to_string(p);
      j["frozen_prices"] = std::move(fp);
    } else {
      j["frozen_prices"] = nullptr;
    }

    j["dai"] = ledger_json(dai_);
    j["mkr"] = ledger_json(mkr_);

    nlohmann::json free = nlohmann::json::object();
    for (const auto& [account, per_type] : free_collateral_) {
      nlohmann::json fj = nlohmann::json::object();
      for (const auto& [cid, units] : per_type) {
        if (units.raw != 0) fj[cid] = to_string(units);
      }
      if (!fj.empty()) free[account] = std::move(fj);
    }
    j["free_collateral"] = std::move(free);

    nlohmann::json vaults = nlohmann::json::object();
    for (const auto& [id, v] : vaults_) {
      nlohmann::json vj;
      vj["owner"] = v.owner;
      vj["collateral"] = v.collateral_id;
      vj["locked_collateral"] = to_string(v.locked_collateral);
      vj["normalized_debt"] = to_string(v.normalized_debt);
      vj["principal"] = to_string(v.principal);
      vj["state"] = vault_state_name(v.state);
      vaults[std::to_string(id)] = std::move(vj);
    }
    j["vaults"] = std::move(vaults);

    nlohmann::json auctions = nlohmann::json::object();
    for (const auto& [id, a] : auctions_) {
      nlohmann::json aj;
      aj["vault_id"] = a.vault_id;
      aj["vault_owner"] = a.vault_owner;
      aj["collateral"] = a.collateral_id;
      aj["lot"] = to_string(a.lot);
      aj["tab"] = to_string(a.tab);
      aj["tab_debt"] = to_string(a.tab_debt);
      aj["principal"] = to_string(a.principal);
      aj["state"] = a.state == AuctionState::kActive ? "ACTIVE" : "SETTLED";
      auctions[std::to_string(id)] = std::move(aj);
    }
    j["auctions"] = std::move(auctions);

    nlohmann::json pot;
    pot["chi"] = to_string(pot_.chi);
    pot["dsr_rate"] = to_string(pot_.dsr_rate);
    pot["updated_at"] = pot_.updated_at;
    pot["epoch_base"] = to_string(pot_.epoch_base);
    pot["epoch_started_at"] = pot_.epoch_started_at;
    pot["total_normalized"] = to_string(pot_.total_normalized);
    nlohmann::json pot_accounts = nlohmann::json::object();
    for (const auto& [account, norm] : pot_.normalized) pot_accounts[account] = to_string(norm);
    pot["accounts"] = std::move(pot_accounts);
    j["pot"] = std::move(pot);

    nlohmann::json proposals = nlohmann::json::object();
    for (const auto& [id, p] : proposals_) {
      nlohmann::json pj;
      pj["param"] = proposal_param_name(p.param);
      if (!p.collateral_id.empty()) pj["collateral"] = p.collateral_id;
      pj["value"] = to_string(p.value);
      pj["deadline"] = p.voting_deadline;
      pj["state"] = proposal_state_name(p.state);
      nlohmann::json tally = nlohmann::json::object();
      for (const auto& [account, weight] : p.tally) tally[account] = to_string(weight);
      pj["tally"] = std::move(tally);
      proposals[std::to_string(id)] = std::move(pj);
    }
    j["proposals"] = std::move(proposals);

    nlohmann::json pool = nlohmann::json::object();
    for (const auto& [cid, units] : redemption_pool_) {
      if (units.raw != 0) pool[cid] = to_string(units);
    }
    j["redemption_pool"] = std::move(pool);

    j["outstanding_system_debt"] = to_string(outstanding_system_debt_);
    j["counters"] = counters_json();
    j["next_ids"] = {{"vault", next_vault_id_},
                     {"auction", next_auction_id_},
                     {"proposal", next_proposal_id_}};
    return j;
  }

  std::string state_hash() const { return hash_json(snapshot()); }

 private:
  // --- helpers ---

  void require_live(const char* op) const {
    if (shutdown_) {
      throw EngineError(ErrorCode::kShutdown, std::string(op) + " rejected after shutdown");
    }
  }

  void require_collateral(const Symbol& id) const {
    if (collateral_.find(id) == collateral_.end()) {
      throw EngineError(ErrorCode::kUnknownCollateral, "no such collateral: " + id);
    }
  }

  void register_collateral_type(const CollateralConfig& cc) {
    if (collateral_.find(cc.id) != collateral_.end()) {
      throw EngineError(ErrorCode::kDuplicateCollateral, cc.id + " already registered");
    }
    CollateralType ct;
    ct.id = cc.id;
    ct.liquidation_ratio = cc.liquidation_ratio;
    ct.fee_accumulator = RAY_ONE;
    ct.accumulator_updated_at = clock_;
    ct.set_rate(annual_to_per_second(cc.stability_fee_annual));
    ct.debt_ceiling = cc.debt_ceiling;
    ct.liquidation_penalty = cc.liquidation_penalty;
    collateral_[cc.id] = std::move(ct);
  }

  Vault& open_vault_of(const Account& caller, VaultId vault_id) {
    auto it = vaults_.find(vault_id);
    if (it == vaults_.end()) {
      throw EngineError(ErrorCode::kUnknownVault, "no vault " + std::to_string(vault_id));
    }
    Vault& v = it->second;
    if (v.state != VaultState::kOpen) {
      throw EngineError(ErrorCode::kVaultNotOpen, "vault " + std::to_string(vault_id));
    }
    if (v.owner != caller) {
      throw EngineError(ErrorCode::kNotOwner,
                        caller + " does not own vault " + std::to_string(vault_id));
    }
    return v;
  }

  // value / debt >= ratio, decided exactly: value * 1e18 >= debt * ratio.
  static bool meets_ratio(Wad value, Wad debt, Wad ratio) {
    if (debt.raw == 0) return true;
    return u256(value.raw) * WAD >= u256(debt.raw) * ratio.raw;
  }

  Proposal& proposal_mut(ProposalId id) {
    auto it = proposals_.find(id);
    if (it == proposals_.end()) {
      throw EngineError(ErrorCode::kUnknownProposal, "no proposal " + std::to_string(id));
    }
    return it->second;
  }

  void validate_proposal(const Proposal& p) const {
    switch (p.param) {
      case ProposalParam::kLiquidationRatio:
        require_collateral(p.collateral_id);
        if (p.value < WAD_ONE) {
          throw EngineError(ErrorCode::kOutOfBounds, "liquidation_ratio must be >= 1.0");
        }
        break;
      case ProposalParam::kStabilityRate:
      case ProposalParam::kDsrRate:
        if (p.param == ProposalParam::kStabilityRate) require_collateral(p.collateral_id);
        if (p.value > Wad{WAD * 10}) {
          throw EngineError(ErrorCode::kOutOfBounds, "annual rate above 1000%");
        }
        break;
      case ProposalParam::kDebtCeiling:
        require_collateral(p.collateral_id);
        break;
      case ProposalParam::kLiquidationPenalty:
        require_collateral(p.collateral_id);
        if (p.value >= WAD_ONE) {
          throw EngineError(ErrorCode::kOutOfBounds, "liquidation_penalty must be < 1.0");
        }
        break;
      case ProposalParam::kAddCollateralType: {
        if (!p.new_collateral) {
          throw EngineError(ErrorCode::kOutOfBounds, "missing new collateral parameters");
        }
        const auto& nc = *p.new_collateral;
        if (nc.id.empty() || nc.id == kMkrSymbol || nc.id == "DAI") {
          throw EngineError(ErrorCode::kOutOfBounds, "bad collateral id");
        }
        if (nc.liquidation_ratio < WAD_ONE) {
          throw EngineError(ErrorCode::kOutOfBounds, "liquidation_ratio must be >= 1.0");
        }
        if (nc.liquidation_penalty >= WAD_ONE) {
          throw EngineError(ErrorCode::kOutOfBounds, "liquidation_penalty must be < 1.0");
        }
        break;
      }
      case ProposalParam::kTriggerShutdown:
        break;
    }
  }

  // Accumulators are already accrued to the current clock (the runner
  // advances time before applying any event), so a rate switch composes
  // cleanly with past accrual.
  void apply_proposal(const Proposal& p) {
    switch (p.param) {
      case ProposalParam::kLiquidationRatio:
        collateral_at(p.collateral_id).liquidation_ratio = p.value;
        break;
      case ProposalParam::kStabilityRate:
        collateral_at(p.collateral_id).set_rate(annual_to_per_second(p.value));
        break;
      case ProposalParam::kDsrRate:
        pot_.set_rate(annual_to_per_second(p.value));
        break;
      case ProposalParam::kDebtCeiling:
        collateral_at(p.collateral_id).debt_ceiling = p.ceiling_value;
        break;
      case ProposalParam::kLiquidationPenalty:
        collateral_at(p.collateral_id).liquidation_penalty = p.value;
        break;
      case ProposalParam::kAddCollateralType: {
        const auto& nc = *p.new_collateral;
        CollateralConfig cc;
        cc.id = nc.id;
        cc.liquidation_ratio = nc.liquidation_ratio;
        cc.stability_fee_annual = nc.stability_fee_annual;
        cc.debt_ceiling = nc.debt_ceiling;
        cc.liquidation_penalty = nc.liquidation_penalty;
        register_collateral_type(cc);
        break;
      }
      case ProposalParam::kTriggerShutdown:
        trigger_shutdown("governance proposal " + std::to_string(p.id));
        break;
    }
  }

  CollateralType& collateral_at(const Symbol& id) {
    auto it = collateral_.find(id);
    if (it == collateral_.end()) {
      throw EngineError(ErrorCode::kUnknownCollateral, "no such collateral: " + id);
    }
    return it->second;
  }

  static nlohmann::json ledger_json(const TokenLedger& ledger) {
    nlohmann::json j;
    j["total_supply"] = to_string(ledger.total_supply());
    nlohmann::json balances = nlohmann::json::object();
    for (const auto& [account, bal] : ledger.balances()) balances[account] = to_string(bal);
    j["balances"] = std::move(balances);
    return j;
  }

  nlohmann::json counters_json() const {
    nlohmann::json j;
    j["dai_minted_generate"] = to_string(counters_.dai_minted_generate);
    j["dai_minted_surplus_income"] = to_string(counters_.dai_minted_surplus_income);
    j["dai_minted_dsr_interest"] = to_string(counters_.dai_minted_dsr_interest);
    j["dai_minted_keeper_fund"] = to_string(counters_.dai_minted_keeper_fund);
    j["dai_burned_repay"] = to_string(counters_.dai_burned_repay);
    j["dai_burned_auction"] = to_string(counters_.dai_burned_auction);
    j["dai_burned_debt_auction"] = to_string(counters_.dai_burned_debt_auction);
    j["dai_burned_surplus_absorb"] = to_string(counters_.dai_burned_surplus_absorb);
    j["dai_burned_redeem"] = to_string(counters_.dai_burned_redeem);
    j["mkr_minted_faucet"] = to_string(counters_.mkr_minted_faucet);
    j["mkr_minted_voting_reward"] = to_string(counters_.mkr_minted_voting_reward);
    j["mkr_minted_debt_auction"] = to_string(counters_.mkr_minted_debt_auction);
    j["mkr_burned_buy_and_burn"] = to_string(counters_.mkr_burned_buy_and_burn);
    j["sys_debt_created_settlement"] = to_string(counters_.sys_debt_created_settlement);
    j["sys_debt_created_dsr"] = to_string(counters_.sys_debt_created_dsr);
    j["sys_debt_covered_surplus"] = to_string(counters_.sys_debt_covered_surplus);
    j["sys_debt_covered_keeper"] = to_string(counters_.sys_debt_covered_keeper);
    j["bad_debt_reported"] = to_string(counters_.bad_debt_reported);
    j["penalty_assessed"] = to_string(counters_.penalty_assessed);
    j["penalty_collected"] = to_string(counters_.penalty_collected);
    nlohmann::json faucet = nlohmann::json::object();
    for (const auto& [cid, amount] : counters_.collateral_faucet) faucet[cid] = to_string(amount);
    j["collateral_faucet"] = std::move(faucet);
    return j;
  }

  // --- audit pieces ---

  void audit_collateral_conservation() const {
    std::map<Symbol, Wad> held;
    for (const auto& [account, per_type] : free_collateral_) {
      for (const auto& [cid, units] : per_type) held[cid] += units;
    }
    for (const auto& [id, v] : vaults_) held[v.collateral_id] += v.locked_collateral;
    for (const auto& [id, a] : auctions_) {
      if (a.state == AuctionState::kActive) held[a.collateral_id] += a.lot;
    }
    for (const auto& [cid, units] : redemption_pool_) held[cid] += units;
    for (const auto& [cid, total] : held) {
      auto it = counters_.collateral_faucet.find(cid);
      Wad fauceted = it == counters_.collateral_faucet.end() ? Wad{} : it->second;
      if (total != fauceted) {
        throw AuditError("collateral " + cid + ": held " + to_string(total) +
                         " != fauceted " + to_string(fauceted));
      }
    }
    for (const auto& [cid, fauceted] : counters_.collateral_faucet) {
      if (held.find(cid) == held.end() && fauceted.raw != 0) {
        throw AuditError("collateral " + cid + " fauceted but nowhere held");
      }
    }
  }

  void audit_dai_flows() const {
    u256 minted = u256(counters_.dai_minted_generate.raw) +
                  counters_.dai_minted_surplus_income.raw +
                  counters_.dai_minted_dsr_interest.raw + counters_.dai_minted_keeper_fund.raw;
    u256 burned = u256(counters_.dai_burned_repay.raw) + counters_.dai_burned_auction.raw +
                  counters_.dai_burned_debt_auction.raw +
                  counters_.dai_burned_surplus_absorb.raw + counters_.dai_burned_redeem.raw;
    if (minted < burned || minted - burned != u256(dai_.total_supply().raw)) {
      throw AuditError("dai supply does not reconcile with mint/burn counters");
    }
  }

  void audit_mkr_flows() const {
    u256 minted = u256(counters_.mkr_minted_faucet.raw) +
                  counters_.mkr_minted_voting_reward.raw + counters_.mkr_minted_debt_auction.raw;
    u256 burned = u256(counters_.mkr_burned_buy_and_burn.raw);
    if (minted < burned || minted - burned != u256(mkr_.total_supply().raw)) {
      throw AuditError("mkr supply does not reconcile with mint/burn counters");
    }
  }

  void audit_system_debt_ledger() const {
    u256 created =
        u256(counters_.sys_debt_created_settlement.raw) + counters_.sys_debt_created_dsr.raw;
    u256 covered =
        u256(counters_.sys_debt_covered_surplus.raw) + counters_.sys_debt_covered_keeper.raw;
    if (created < covered || created - covered != u256(outstanding_system_debt_.raw)) {
      throw AuditError("system debt ledger does not reconcile");
    }
  }

  // Reported bad debt (tab - proceeds) equals the unbacked shortfall plus
  // the assessed-but-uncollected penalty, exactly.
  void audit_penalty_reconciliation() const {
    // Active auctions carry an assessed-but-unresolved penalty of
    // tab - tab_debt; settlement converts it into collected penalty,
    // reported bad debt, or settlement system debt.
    u256 lhs = u256(counters_.bad_debt_reported.raw) + counters_.penalty_collected.raw;
    for (const auto& [id, a] : auctions_) {
      if (a.state == AuctionState::kActive) lhs += u256(a.tab.raw) - a.tab_debt.raw;
    }
    u256 rhs = u256(counters_.sys_debt_created_settlement.raw) + counters_.penalty_assessed.raw;
    if (lhs != rhs) {
      throw AuditError("bad debt does not reconcile with penalty ledger");
    }
  }

  void audit_normalized_totals() const {
    std::map<Symbol, Wad> art_sums;
    for (const auto& [id, v] : vaults_) art_sums[v.collateral_id] += v.normalized_debt;
    for (const auto& [cid, ct] : collateral_) {
      Wad expect = art_sums.count(cid) ? art_sums[cid] : Wad{};
      if (ct.total_normalized_debt != expect) {
        throw AuditError("collateral " + cid + ": total normalized debt out of sync");
      }
    }
    Wad pot_sum{};
    for (const auto& [account, norm] : pot_.normalized) pot_sum += norm;
    if (pot_sum != pot_.total_normalized) {
      throw AuditError("savings pot normalized total out of sync");
    }
  }

  // The pot must hold at least its grown liability floor(total_norm x chi).
  void audit_pot_solvency() const {
    Wad required = wad_ray_mul(pot_.total_normalized, pot_.chi);
    if (dai_.balance(kPotAccount) < required) {
      throw AuditError("savings pot holds less Dai than it owes");
    }
  }

  // Live backing identity: open vault debts + active auction debt +
  // uncovered system debt == Dai supply - keeper funding. Exact; after
  // shutdown redemption replaces debt backing and this no longer applies.
  void audit_backing() const {
    u256 backed = outstanding_system_debt_.raw;
    for (const auto& [id, v] : vaults_) {
      if (v.state != VaultState::kOpen || v.normalized_debt.raw == 0) continue;
      backed += v.current_debt(collateral_.at(v.collateral_id)).raw;
    }
    for (const auto& [id, a] : auctions_) {
      if (a.state == AuctionState::kActive) backed += a.tab_debt.raw;
    }
    u256 supply = u256(dai_.total_supply().raw);
    u256 funding = u256(counters_.dai_minted_keeper_fund.raw);
    if (supply < funding || backed != supply - funding) {
      throw AuditError("backing identity violated: debts do not match Dai supply");
    }
  }

  // --- state ---

  SimConfig cfg_;
  Seconds clock_ = 0;
  bool shutdown_ = false;
  Seconds shutdown_at_ = 0;
  std::string shutdown_reason_;

  PriceFeed feed_;
  TokenLedger dai_{"DAI"};
  TokenLedger mkr_{"MKR"};
  std::map<Symbol, CollateralType> collateral_;
  std::map<Account, std::map<Symbol, Wad>> free_collateral_;

  std::map<VaultId, Vault> vaults_;
  VaultId next_vault_id_ = 1;
  std::map<AuctionId, Auction> auctions_;
  AuctionId next_auction_id_ = 1;

  SavingsPot pot_;

  std::map<ProposalId, Proposal> proposals_;
  ProposalId next_proposal_id_ = 1;

  std::map<Symbol, Wad> redemption_pool_;
  Wad outstanding_system_debt_{};
  MintBurnCounters counters_;

  std::vector<SettlementRecord> settlements_;
  std::vector<DebtAuctionRecord> debt_auctions_;
  std::vector<BuyBurnRecord> buy_burns_;
  std::vector<ProposalOutcome> proposal_outcomes_;
};

}  // namespace cdpsim
