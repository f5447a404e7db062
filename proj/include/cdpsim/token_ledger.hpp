// Balance map plus total supply for one token. Supply always equals the
// exact sum of balances; mint/burn/transfer keep that by construction and
// audit() re-derives it from scratch.
#pragma once

#include <map>
#include <string>

#include "cdpsim/errors.hpp"
#include "cdpsim/fixed_point.hpp"

namespace cdpsim {

using Account = std::string;

class TokenLedger {
 public:
  explicit TokenLedger(std::string token_name) : token_(std::move(token_name)) {}

  const std::string& token() const { return token_; }
  Wad total_supply() const { return total_supply_; }

  Wad balance(const Account& account) const {
    auto it = balances_.find(account);
    return it == balances_.end() ? Wad{} : it->second;
  }

  void mint(const Account& account, Wad amount) {
    total_supply_ += amount;
    balances_[account] += amount;
  }

  void burn(const Account& account, Wad amount) {
    auto it = balances_.find(account);
    if (it == balances_.end() || it->second < amount) {
      throw EngineError(ErrorCode::kInsufficientBalance,
                        token_ + " burn of " + to_string(amount) + " from " + account);
    }
    it->second -= amount;
    total_supply_ -= amount;
    if (it->second.raw == 0) balances_.erase(it);
  }

  void transfer(const Account& from, const Account& to, Wad amount) {
    auto it = balances_.find(from);
    if (it == balances_.end() || it->second < amount) {
      throw EngineError(ErrorCode::kInsufficientBalance,
                        token_ + " transfer of " + to_string(amount) + " from " + from);
    }
    it->second -= amount;
    if (it->second.raw == 0) balances_.erase(it);
    balances_[to] += amount;
  }

  const std::map<Account, Wad>& balances() const { return balances_; }

  void audit() const {
    Wad sum{};
    for (const auto& [account, bal] : balances_) sum += bal;
    if (sum != total_supply_) {
      throw AuditError(token_ + " ledger: supply " + to_string(total_supply_) +
                       " != sum of balances " + to_string(sum));
    }
  }

 private:
  std::string token_;
  std::map<Account, Wad> balances_;
  Wad total_supply_{};
};

}  // namespace cdpsim
