// Dai savings: deposits accrue at the governance-set rate via the chi
// index, withdrawable at any time with no limits.
#pragma once

#include <map>

#include "cdpsim/errors.hpp"
#include "cdpsim/fixed_point.hpp"
#include "cdpsim/vault.hpp"

namespace cdpsim {

struct SavingsPot {
  Ray chi = RAY_ONE;        // deposit growth index, non-decreasing
  Ray dsr_rate = RAY_ONE;   // per-second factor
  Seconds updated_at = 0;
  Ray epoch_base = RAY_ONE;       // chi when the rate was set
  Seconds epoch_started_at = 0;
  Wad total_normalized{};   // sum of account normalized balances
  std::map<Account, Wad> normalized;  // account -> balance / chi at deposit

  // Recomputes chi at `now` from the rate epoch's base (timestamp-driven,
  // independent of intermediate accruals); returns the Dai the pot must
  // gain so current claims stay covered (0 when nothing accrued).
  Wad accrue(Seconds now, Wad pot_balance) {
    if (now < updated_at) {
      throw EngineError(ErrorCode::kTimeRegression, "savings accrual going backwards");
    }
    auto dt = static_cast<uint64_t>(now - epoch_started_at);
    chi = dsr_rate == RAY_ONE ? epoch_base : ray_mul(epoch_base, ray_pow(dsr_rate, dt));
    updated_at = now;
    Wad required = wad_ray_mul(total_normalized, chi);
    return required > pot_balance ? required - pot_balance : Wad{};
  }

  // Cuts the epoch at the last accrual point; callers accrue to the
  // change's timestamp first.
  void set_rate(Ray per_second) {
    dsr_rate = per_second;
    epoch_base = chi;
    epoch_started_at = updated_at;
  }

  Wad balance(const Account& account) const {
    auto it = normalized.find(account);
    return it == normalized.end() ? Wad{} : wad_ray_mul(it->second, chi);
  }
};

}  // namespace cdpsim
