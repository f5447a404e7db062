// Per-asset risk parameters and the cumulative stability-fee index.
//
// Vault debts are stored normalized: current debt = normalized_debt *
// fee_accumulator. Accruing the accumulator once per collateral type
// compounds every vault's debt in O(1).
#pragma once

#include <optional>
#include <string>

#include "cdpsim/errors.hpp"
#include "cdpsim/fixed_point.hpp"

namespace cdpsim {

using Seconds = int64_t;
using Symbol = std::string;

struct CollateralType {
  Symbol id;
  Wad liquidation_ratio{WAD + WAD / 2};          // 1.5 unless configured
  Ray stability_rate = RAY_ONE;                  // per-second factor, >= 1
  Ray fee_accumulator = RAY_ONE;                 // non-decreasing index
  Seconds accumulator_updated_at = 0;
  Ray epoch_base = RAY_ONE;                      // index value when the rate was set
  Seconds epoch_started_at = 0;
  std::optional<Wad> debt_ceiling;               // nullopt = unlimited
  Wad liquidation_penalty{WAD * 13 / 100};       // fraction of debt, default 13%
  Wad total_normalized_debt{};                   // sum of vault art for this type

  // Recomputes the fee index at `now` from the rate epoch's base, so the
  // value at a timestamp never depends on how often accrual ran in
  // between (only rate changes cut a new epoch).
  void accrue(Seconds now) {
    if (now < accumulator_updated_at) {
      throw EngineError(ErrorCode::kTimeRegression,
                        "accrual for " + id + " going backwards");
    }
    auto dt = static_cast<uint64_t>(now - epoch_started_at);
    fee_accumulator =
        stability_rate == RAY_ONE ? epoch_base : ray_mul(epoch_base, ray_pow(stability_rate, dt));
    accumulator_updated_at = now;
  }

  // Cuts the epoch at the last accrual point; callers accrue to the
  // change's timestamp first.
  void set_rate(Ray per_second) {
    stability_rate = per_second;
    epoch_base = fee_accumulator;
    epoch_started_at = accumulator_updated_at;
  }

  Wad total_debt() const { return wad_ray_mul(total_normalized_debt, fee_accumulator); }
};

}  // namespace cdpsim
