#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "cdpsim/engine.hpp"

namespace cdpsim {
namespace {

using boost::multiprecision::cpp_int;

Wad wad(const char* s) { return wad_from_string(s); }

SimConfig dsr_config(const char* dsr_annual, const char* eth_fee = "0") {
  SimConfig cfg;
  CollateralConfig eth;
  eth.id = "ETH";
  eth.liquidation_ratio = wad("1.5");
  eth.stability_fee_annual = wad_from_string(eth_fee);
  eth.initial_price = wad("150");
  cfg.collateral_types = {eth};
  cfg.dsr_annual = wad_from_string(dsr_annual);
  return cfg;
}

// Gives `owner` `amount` spendable Dai from a deeply collateralized vault.
void give_dai(Engine& eng, const Account& owner, Wad amount) {
  eng.faucet_collateral(owner, "ETH", wad("10000"));
  VaultId v = eng.open_vault(owner, "ETH");
  eng.deposit_collateral(owner, v, wad("10000"));
  eng.generate_dai(owner, v, amount);
}

TEST(Dsr, ZeroRateLeavesChiUntouched) {
  Engine eng(dsr_config("0"));
  give_dai(eng, "alice", wad("100"));
  eng.dsr_deposit("alice", wad("100"));
  eng.advance_time(10 * SECONDS_PER_YEAR);
  EXPECT_EQ(eng.pot().chi, RAY_ONE);
  EXPECT_EQ(eng.dsr_balance("alice"), wad("100"));
  EXPECT_EQ(eng.outstanding_system_debt(), Wad{0});
  eng.audit();
}

TEST(Dsr, HundredGrowsToHundredOneInAYear) {
  Engine eng(dsr_config("0.01"));
  give_dai(eng, "alice", wad("100"));
  eng.dsr_deposit("alice", wad("100"));
  eng.advance_time(SECONDS_PER_YEAR);

  cpp_int got(eng.dsr_balance("alice").raw);
  cpp_int want = cpp_int(WAD) * 101;
  cpp_int diff = got > want ? got - want : want - got;
  EXPECT_LE(diff * 1000000000, want);  // within 1e-9 relative

  // interest had no surplus to net against, so it stays system debt
  EXPECT_EQ(eng.counters().dai_minted_dsr_interest, eng.counters().sys_debt_created_dsr);
  EXPECT_GT(eng.counters().sys_debt_created_dsr, Wad{0});
  EXPECT_EQ(eng.outstanding_system_debt(), eng.counters().sys_debt_created_dsr);
  eng.audit();

  // full withdrawal works and the wallet ends with the grown balance
  Wad balance = eng.dsr_balance("alice");
  eng.dsr_withdraw("alice", balance);
  EXPECT_EQ(eng.dai().balance("alice"), balance);
  EXPECT_EQ(eng.dsr_balance("alice"), Wad{0});
  eng.audit();
}

// chi is recomputed from the rate epoch, so the accrual schedule cannot
// shift its value at a given timestamp.
TEST(Dsr, SplitAccrualEqualsSingleExactly) {
  for (int64_t t1 : {1, 3600, 1000000}) {
    for (int64_t t2 : {59, 86400}) {
      Engine split(dsr_config("0.05"));
      give_dai(split, "alice", wad("1000"));
      split.dsr_deposit("alice", wad("1000"));
      split.advance_time(t1);
      split.advance_time(t1 + t2);

      Engine single(dsr_config("0.05"));
      give_dai(single, "alice", wad("1000"));
      single.dsr_deposit("alice", wad("1000"));
      single.advance_time(t1 + t2);

      EXPECT_EQ(split.pot().chi, single.pot().chi) << t1 << "+" << t2;
      EXPECT_EQ(split.dai().balance("system.pot"), single.dai().balance("system.pot"))
          << t1 << "+" << t2;
    }
  }
}

TEST(Dsr, ImmediateDepositWithdrawRoundTrip) {
  Engine eng(dsr_config("0.01"));
  give_dai(eng, "alice", wad("250"));
  eng.dsr_deposit("alice", wad("100"));
  EXPECT_EQ(eng.dsr_balance("alice"), wad("100"));
  eng.dsr_withdraw("alice", wad("100"));
  EXPECT_EQ(eng.dai().balance("alice"), wad("250"));
  EXPECT_EQ(eng.dsr_balance("alice"), Wad{0});
  eng.audit();
}

TEST(Dsr, WithdrawBeyondBalanceRejected) {
  Engine eng(dsr_config("0.01"));
  give_dai(eng, "alice", wad("100"));
  eng.dsr_deposit("alice", wad("100"));
  eng.advance_time(86400 * 30);
  Wad balance = eng.dsr_balance("alice");
  try {
    eng.dsr_withdraw("alice", balance + Wad{1});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientBalance);
  }
  eng.dsr_withdraw("alice", balance);
  eng.audit();
}

TEST(Dsr, DepositBeyondWalletRejected) {
  Engine eng(dsr_config("0.01"));
  give_dai(eng, "alice", wad("100"));
  EXPECT_THROW(eng.dsr_deposit("alice", wad("100.000000000000000001")), EngineError);
}

TEST(Dsr, InterestComesFromSurplusWhenFeesCoverIt) {
  // 5%/yr stability fees on 10000 Dai of vault debt dwarf 1%/yr DSR
  // interest on a 100 Dai deposit, so fee income nets the DSR system debt
  // to zero and the remainder stays in the surplus buffer.
  Engine eng(dsr_config("0.01", "0.05"));
  give_dai(eng, "alice", wad("10000"));
  eng.dsr_deposit("alice", wad("100"));
  eng.advance_time(SECONDS_PER_YEAR);
  EXPECT_GT(eng.counters().sys_debt_created_dsr, Wad{0});
  EXPECT_EQ(eng.counters().sys_debt_covered_surplus, eng.counters().sys_debt_created_dsr);
  EXPECT_EQ(eng.outstanding_system_debt(), Wad{0});
  EXPECT_GT(eng.dsr_balance("alice"), wad("100"));
  EXPECT_GT(eng.dai().balance("system.surplus"), Wad{0});
  eng.audit();
}

TEST(Dsr, WithdrawAnytimeAcrossRandomSchedules) {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 5; ++round) {
    Engine eng(dsr_config("0.07"));
    std::vector<Account> users = {"u0", "u1", "u2"};
    for (const auto& u : users) give_dai(eng, u, wad("100000"));
    int64_t t = 0;
    int ops = 0;
    for (int step = 0; step < 120; ++step) {
      t += static_cast<int64_t>(rng() % 200000);
      eng.advance_time(t);
      const Account& u = users[rng() % users.size()];
      if (rng() & 1) {
        Wad amount{rng() % (500 * WAD) + 1};
        if (eng.dai().balance(u) >= amount) {
          eng.dsr_deposit(u, amount);
          ++ops;
        }
      } else {
        Wad balance = eng.dsr_balance(u);
        if (balance.raw == 0) continue;
        // any fraction up to the full balance must withdraw cleanly
        Wad amount{rng() % balance.raw + 1};
        eng.dsr_withdraw(u, amount);
        ++ops;
      }
      // pot covers every claim; excess is bounded rounding dust
      Wad claims{};
      for (const auto& u2 : users) claims += eng.dsr_balance(u2);
      Wad pot_dai = eng.dai().balance("system.pot");
      EXPECT_GE(pot_dai, claims);
      EXPECT_LE(pot_dai.raw - claims.raw, u128{3} * (ops + 1) + users.size());
      eng.audit();
    }
    // everyone exits in full at the end
    for (const auto& u : users) {
      Wad balance = eng.dsr_balance(u);
      if (balance.raw != 0) eng.dsr_withdraw(u, balance);
      EXPECT_EQ(eng.dsr_balance(u), Wad{0});
    }
    eng.audit();
  }
}

TEST(Dsr, SubResolutionDepositIsANoOp) {
  Engine eng(dsr_config("0.05"));
  give_dai(eng, "alice", wad("100"));
  eng.advance_time(SECONDS_PER_YEAR);  // chi > 1
  ASSERT_GT(eng.pot().chi, RAY_ONE);
  Wad before = eng.dai().balance("alice");
  eng.dsr_deposit("alice", Wad{1});  // floors to zero normalized units
  EXPECT_EQ(eng.dai().balance("alice"), before);
  EXPECT_EQ(eng.dsr_balance("alice"), Wad{0});
}

TEST(Dsr, PotAccrualRejectsTimeRegression) {
  SavingsPot pot;
  pot.set_rate(annual_to_per_second(wad("0.01")));
  pot.accrue(100, Wad{0});
  EXPECT_THROW(pot.accrue(99, Wad{0}), EngineError);
}

}  // namespace
}  // namespace cdpsim
