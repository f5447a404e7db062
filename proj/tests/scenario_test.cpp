#include "cdpsim/scenario.hpp"

#include <gtest/gtest.h>

namespace cdpsim {
namespace {

Wad wad(const char* s) { return wad_from_string(s); }

size_t error_line(const std::string& text, uint64_t seed = 0) {
  try {
    parse_scenario(text, seed);
  } catch (const ScenarioParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(Parse, OrdersByTimeThenSeqStably) {
  auto events = parse_scenario(
      R"({"t": 50, "seq": 2, "op": "checkpoint"}
{"t": 50, "seq": 1, "op": "checkpoint"}
{"t": 10, "seq": 9, "op": "checkpoint"}
)",
      0);
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].t, 10);
  EXPECT_EQ(events[1].seq, 1);
  EXPECT_EQ(events[2].seq, 2);
}

TEST(Parse, SkipsCommentsAndBlankLines) {
  auto events = parse_scenario(
      "# a comment\n"
      "\n"
      "   \t\n"
      "  # indented comment\n"
      "{\"t\": 0, \"seq\": 0, \"op\": \"checkpoint\"}\n",
      0);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].line, 5u);
}

TEST(Parse, ValidatesEveryOpShape) {
  const char* good =
      R"({"t":0,"seq":0,"op":"faucet","args":{"account":"a","asset":"ETH","amount":"5"}}
{"t":0,"seq":1,"op":"set_price","args":{"symbol":"ETH","price":"150"}}
{"t":0,"seq":2,"op":"open_vault","args":{"owner":"a","collateral":"ETH"}}
{"t":0,"seq":3,"op":"deposit","args":{"account":"a","vault":1,"amount":"5"}}
{"t":0,"seq":4,"op":"generate","args":{"account":"a","vault":1,"amount":"100"}}
{"t":0,"seq":5,"op":"repay","args":{"account":"a","vault":1,"amount":"10"}}
{"t":0,"seq":6,"op":"withdraw","args":{"account":"a","vault":1,"amount":"1"}}
{"t":0,"seq":7,"op":"close","args":{"account":"a","vault":1}}
{"t":0,"seq":8,"op":"dsr_deposit","args":{"account":"a","amount":"10"}}
{"t":0,"seq":9,"op":"dsr_withdraw","args":{"account":"a","amount":"10"}}
{"t":0,"seq":10,"op":"propose","args":{"param":"liquidation_ratio","collateral":"ETH","value":"1.6","deadline":100}}
{"t":0,"seq":11,"op":"vote","args":{"proposal":1,"account":"a"}}
{"t":200,"seq":0,"op":"tally","args":{"proposal":1}}
{"t":200,"seq":1,"op":"fund_keeper","args":{"token":"DAI","amount":"500"}}
{"t":200,"seq":2,"op":"scan_and_liquidate"}
{"t":200,"seq":3,"op":"buy_and_burn"}
{"t":200,"seq":4,"op":"checkpoint"}
{"t":300,"seq":0,"op":"trigger_shutdown","args":{"reason":"drill"}}
{"t":300,"seq":1,"op":"withdraw_excess","args":{"account":"a","vault":1}}
{"t":300,"seq":2,"op":"redeem","args":{"account":"a","amount":"10"}}
)";
  auto events = parse_scenario(good, 0);
  EXPECT_EQ(events.size(), 20u);
  EXPECT_EQ(events[0].kind, EventKind::kFaucet);
  EXPECT_EQ(events.back().kind, EventKind::kRedeem);
}

TEST(Parse, LineNumbersInErrors) {
  // line 2 has garbage JSON
  EXPECT_EQ(error_line("{\"t\":0,\"seq\":0,\"op\":\"checkpoint\"}\n{oops\n"), 2u);
  // line 1 unknown op
  EXPECT_EQ(error_line(R"({"t":0,"seq":0,"op":"explode"})"), 1u);
  // line 3 missing required arg
  EXPECT_EQ(error_line("# c\n{\"t\":0,\"seq\":0,\"op\":\"checkpoint\"}\n"
                       "{\"t\":1,\"seq\":0,\"op\":\"faucet\",\"args\":{\"account\":\"a\"}}\n"),
            3u);
}

TEST(Parse, RejectsUnknownKeysAndArgs) {
  EXPECT_THROW(parse_scenario(R"({"t":0,"seq":0,"op":"checkpoint","when":5})", 0),
               ScenarioParseError);
  EXPECT_THROW(
      parse_scenario(
          R"({"t":0,"seq":0,"op":"set_price","args":{"symbol":"ETH","price":"1","x":"y"}})", 0),
      ScenarioParseError);
  EXPECT_THROW(parse_scenario(R"({"t":0,"seq":0,"op":"checkpoint","args":{"z":1}})", 0),
               ScenarioParseError);
}

TEST(Parse, RejectsMalformedFields) {
  EXPECT_THROW(parse_scenario(R"({"seq":0,"op":"checkpoint"})", 0), ScenarioParseError);
  EXPECT_THROW(parse_scenario(R"({"t":-5,"seq":0,"op":"checkpoint"})", 0), ScenarioParseError);
  EXPECT_THROW(parse_scenario(R"({"t":0.5,"seq":0,"op":"checkpoint"})", 0), ScenarioParseError);
  EXPECT_THROW(parse_scenario(R"({"t":0,"seq":0,"op":7})", 0), ScenarioParseError);
  EXPECT_THROW(parse_scenario(R"([1,2,3])", 0), ScenarioParseError);
  EXPECT_THROW(
      parse_scenario(R"({"t":0,"seq":0,"op":"set_price","args":{"symbol":"ETH","price":"-1"}})",
                     0),
      ScenarioParseError);
  EXPECT_THROW(
      parse_scenario(R"({"t":0,"seq":0,"op":"fund_keeper","args":{"token":"ETH","amount":"1"}})",
                     0),
      ScenarioParseError);
}

TEST(Parse, DuplicateTimeSeqReportsBothLines) {
  try {
    parse_scenario("{\"t\":5,\"seq\":1,\"op\":\"checkpoint\"}\n"
                   "# pad\n"
                   "{\"t\":5,\"seq\":1,\"op\":\"buy_and_burn\"}\n",
                   0);
    FAIL();
  } catch (const ScenarioParseError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("duplicate"), std::string::npos);
    EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(Walk, ExpandsDeterministicallyFromSeed) {
  const char* text =
      R"({"t":100,"seq":0,"op":"random_walk_prices","args":{"symbol":"ETH","start":"200","steps":5,"drift":"0","vol":"0.02","seed":99,"step_dt":60}})";
  auto a = parse_scenario(text, 1);
  auto b = parse_scenario(text, 2);  // explicit seed ignores the global one
  ASSERT_EQ(a.size(), 6u);
  ASSERT_EQ(b.size(), 6u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].args.at("price"), b[i].args.at("price"));
    EXPECT_EQ(a[i].t, 100 + static_cast<int64_t>(i) * 60);
    EXPECT_EQ(a[i].kind, EventKind::kSetPrice);
  }
  EXPECT_EQ(a[0].args.at("price").get<std::string>(), to_string(wad("200")));
}

TEST(Walk, GlobalSeedDrivesUnseededWalks) {
  const char* text =
      R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"ETH","start":"100","steps":8,"drift":"0","vol":"0.05"}})";
  auto a = parse_scenario(text, 7);
  auto b = parse_scenario(text, 7);
  auto c = parse_scenario(text, 8);
  ASSERT_EQ(a.size(), 9u);
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].args.at("price"), b[i].args.at("price"));
    if (a[i].args.at("price") != c[i].args.at("price")) any_diff = true;
  }
  EXPECT_TRUE(any_diff);  // different global seed, different path
}

TEST(Walk, ZeroVolIsPureDrift) {
  // one step of -25% drift: $200 -> $150 exactly
  const char* text =
      R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"ETH","start":"200","steps":1,"drift":"-0.25","vol":"0"}})";
  auto events = parse_scenario(text, 0);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].args.at("price").get<std::string>(), to_string(wad("200")));
  EXPECT_EQ(events[0].t, 0);
  EXPECT_EQ(events[1].args.at("price").get<std::string>(), to_string(wad("150")));
  EXPECT_EQ(events[1].t, 3600);  // default step spacing
}

TEST(Walk, PositiveDriftCompounds) {
  const char* text =
      R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"ETH","start":"100","steps":2,"drift":"0.1","vol":"0"}})";
  auto events = parse_scenario(text, 0);
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[1].args.at("price").get<std::string>(), to_string(wad("110")));
  EXPECT_EQ(events[2].args.at("price").get<std::string>(), to_string(wad("121")));
}

TEST(Walk, PricesNeverReachZero) {
  const char* text =
      R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"ETH","start":"0.000000000000000005","steps":50,"drift":"-0.99","vol":"0","seed":1}})";
  auto events = parse_scenario(text, 0);
  for (const auto& ev : events) {
    EXPECT_GE(wad_from_string(ev.args.at("price").get<std::string>()).raw, u128{1});
  }
}

TEST(Walk, ParameterBoundsEnforced) {
  EXPECT_THROW(
      parse_scenario(
          R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"E","start":"0","steps":1,"drift":"0","vol":"0"}})",
          0),
      ScenarioParseError);
  EXPECT_THROW(
      parse_scenario(
          R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"E","start":"1","steps":1,"drift":"11","vol":"0"}})",
          0),
      ScenarioParseError);
  EXPECT_THROW(
      parse_scenario(
          R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"E","start":"1","steps":1,"drift":"0","vol":"99"}})",
          0),
      ScenarioParseError);
  EXPECT_THROW(
      parse_scenario(
          R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"E","start":"1","steps":1,"drift":"0","vol":"0","step_dt":0}})",
          0),
      ScenarioParseError);
  EXPECT_THROW(
      parse_scenario(
          R"({"t":0,"seq":0,"op":"random_walk_prices","args":{"symbol":"E","start":"1","steps":1,"drift":"0","vol":"0","dt":9}})",
          0),
      ScenarioParseError);
}

TEST(Walk, StepsInterleaveWithOtherEventsByTime) {
  const char* text =
      R"({"t":0,"seq":5,"op":"random_walk_prices","args":{"symbol":"ETH","start":"100","steps":2,"drift":"0.1","vol":"0","step_dt":100}}
{"t":150,"seq":0,"op":"checkpoint"}
)";
  auto events = parse_scenario(text, 0);
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[0].t, 0);
  EXPECT_EQ(events[1].t, 100);
  EXPECT_EQ(events[2].op, "checkpoint");
  EXPECT_EQ(events[3].t, 200);
}

}  // namespace
}  // namespace cdpsim
