#include <gtest/gtest.h>

#include "cdpsim/config.hpp"
#include "cdpsim/engine.hpp"
#include "cdpsim/price_feed.hpp"

namespace cdpsim {
namespace {

Wad wad(const char* s) { return wad_from_string(s); }

SimConfig two_asset_config() {
  SimConfig cfg;
  CollateralConfig eth;
  eth.id = "ETH";
  eth.liquidation_ratio = wad("1.5");
  eth.initial_price = wad("150");
  CollateralConfig wbtc;
  wbtc.id = "WBTC";
  wbtc.liquidation_ratio = wad("1.75");
  wbtc.initial_price = wad("20000");
  cfg.collateral_types = {eth, wbtc};
  cfg.mkr_initial_price = wad("500");
  return cfg;
}

TEST(PriceFeed, SetAndReadBack) {
  PriceFeed feed;
  feed.set_price("ETH", wad("150"));
  EXPECT_EQ(feed.price("ETH"), wad("150"));
  feed.set_price("ETH", wad("200"));
  EXPECT_EQ(feed.price("ETH"), wad("200"));
}

TEST(PriceFeed, RejectsZeroAndUnknown) {
  PriceFeed feed;
  try {
    feed.set_price("ETH", Wad{0});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPriceInvalid);
  }
  EXPECT_THROW(feed.price("ETH"), EngineError);
  EXPECT_FALSE(feed.has_price("ETH"));
}

TEST(PriceFeed, FreezeMakesFeedImmutable) {
  PriceFeed feed;
  feed.set_price("ETH", wad("150"));
  feed.freeze();
  EXPECT_TRUE(feed.frozen());
  EXPECT_EQ(feed.price("ETH"), wad("150"));
  try {
    feed.set_price("ETH", wad("151"));
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFrozen);
  }
  EXPECT_EQ(feed.frozen_prices().at("ETH"), wad("150"));
}

TEST(EngineMarket, SetPriceRequiresKnownSymbol) {
  Engine eng(two_asset_config());
  eng.set_price("ETH", wad("175"));
  EXPECT_EQ(eng.price("ETH"), wad("175"));
  eng.set_price("MKR", wad("600"));
  try {
    eng.set_price("DOGE", wad("1"));
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownSymbol);
  }
}

TEST(EngineMarket, AccumulatorNonDecreasingUnderAccrual) {
  SimConfig cfg = two_asset_config();
  cfg.collateral_types[0].stability_fee_annual = wad("0.05");
  Engine eng(cfg);
  Ray prev = eng.collateral("ETH").fee_accumulator;
  EXPECT_EQ(prev, RAY_ONE);
  for (int i = 1; i <= 50; ++i) {
    eng.advance_time(i * 86400);
    Ray cur = eng.collateral("ETH").fee_accumulator;
    EXPECT_GE(cur, prev);
    prev = cur;
  }
  // zero-rate collateral stays at exactly 1.0
  EXPECT_EQ(eng.collateral("WBTC").fee_accumulator, RAY_ONE);
}

TEST(EngineMarket, TotalCollateralValueMatchesBruteForce) {
  Engine eng(two_asset_config());
  eng.faucet_collateral("alice", "ETH", wad("10"));
  eng.faucet_collateral("bob", "WBTC", wad("0.5"));
  VaultId va = eng.open_vault("alice", "ETH");
  VaultId vb = eng.open_vault("bob", "WBTC");
  eng.deposit_collateral("alice", va, wad("7.25"));
  eng.deposit_collateral("bob", vb, wad("0.5"));

  Wad expected = wad_mul(wad("7.25"), eng.price("ETH")) +
                 wad_mul(wad("0.5"), eng.price("WBTC"));
  EXPECT_EQ(eng.total_collateral_value(), expected);

  // free (faucet, undeposited) collateral is not protocol-held
  EXPECT_EQ(eng.free_collateral("alice", "ETH"), wad("2.75"));

  eng.set_price("ETH", wad("300"));
  expected = wad_mul(wad("7.25"), wad("300")) + wad_mul(wad("0.5"), wad("20000"));
  EXPECT_EQ(eng.total_collateral_value(), expected);
  eng.audit();
}

TEST(EngineMarket, TvlAddsPotBalance) {
  Engine eng(two_asset_config());
  eng.faucet_collateral("alice", "ETH", wad("10"));
  VaultId v = eng.open_vault("alice", "ETH");
  eng.deposit_collateral("alice", v, wad("10"));
  eng.generate_dai("alice", v, wad("400"));
  EXPECT_EQ(eng.protocol_tvl(), eng.total_collateral_value());
  eng.dsr_deposit("alice", wad("150"));
  EXPECT_EQ(eng.protocol_tvl(), eng.total_collateral_value() + wad("150"));
  eng.audit();
}

TEST(EngineMarket, FaucetCountersFeedConservationAudit) {
  Engine eng(two_asset_config());
  eng.faucet_collateral("alice", "ETH", wad("3"));
  eng.faucet_collateral("alice", "ETH", wad("4"));
  EXPECT_EQ(eng.counters().collateral_faucet.at("ETH"), wad("7"));
  eng.faucet_mkr("alice", wad("2"));
  EXPECT_EQ(eng.mkr().total_supply(), wad("2"));
  eng.audit();
}

TEST(Config, ValidationRejectsBadParameters) {
  SimConfig cfg = two_asset_config();
  cfg.collateral_types[1].id = "ETH";
  EXPECT_THROW(Engine{cfg}, ConfigError);

  cfg = two_asset_config();
  cfg.collateral_types[0].liquidation_ratio = wad("0.99");
  EXPECT_THROW(Engine{cfg}, ConfigError);

  cfg = two_asset_config();
  cfg.collateral_types[0].liquidation_penalty = wad("1");
  EXPECT_THROW(Engine{cfg}, ConfigError);

  cfg = two_asset_config();
  cfg.collateral_types[0].id = "MKR";
  EXPECT_THROW(Engine{cfg}, ConfigError);

  cfg = two_asset_config();
  cfg.collateral_types.clear();
  EXPECT_THROW(Engine{cfg}, ConfigError);

  cfg = two_asset_config();
  cfg.auction_discount = wad("1");
  EXPECT_THROW(Engine{cfg}, ConfigError);
}

TEST(Config, ParsesDecimalStringFields) {
  const char* text = R"({
    "collateral_types": [
      {"id": "ETH", "liquidation_ratio": "1.5", "stability_fee_annual": "0.05",
       "liquidation_penalty": "0.13", "initial_price": "150", "debt_ceiling": "1000000"}
    ],
    "dsr_annual": "0.01",
    "auction_discount": "0.03",
    "voting_reward_mkr": "0.01",
    "approval_threshold": "0.5",
    "mkr_initial_price": "500"
  })";
  SimConfig cfg = parse_config_text(text);
  ASSERT_EQ(cfg.collateral_types.size(), 1u);
  EXPECT_EQ(cfg.collateral_types[0].liquidation_ratio, wad("1.5"));
  EXPECT_EQ(cfg.collateral_types[0].stability_fee_annual, wad("0.05"));
  ASSERT_TRUE(cfg.collateral_types[0].debt_ceiling.has_value());
  EXPECT_EQ(*cfg.collateral_types[0].debt_ceiling, wad("1000000"));
  EXPECT_EQ(cfg.dsr_annual, wad("0.01"));
  ASSERT_TRUE(cfg.mkr_initial_price.has_value());
  EXPECT_EQ(*cfg.mkr_initial_price, wad("500"));
}

TEST(Config, RejectsNonStringNumbersAndBadJson) {
  EXPECT_THROW(parse_config_text("{"), ConfigError);
  EXPECT_THROW(parse_config_text("[]"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"collateral_types": "x"})"), ConfigError);
  EXPECT_THROW(
      parse_config_text(R"({"collateral_types": [{"id": "ETH", "liquidation_ratio": 1.5}]})"),
      ConfigError);
  EXPECT_THROW(parse_config_text(R"({"collateral_types": [{"liquidation_ratio": "1.5"}]})"),
               ConfigError);
}

}  // namespace
}  // namespace cdpsim
