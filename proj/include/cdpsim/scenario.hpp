// Scenario files: JSON Lines, one event object per line, applied in
// (t, seq) order. '#' comment lines and blank lines are skipped. Amounts
// are decimal strings at wad precision. random_walk_prices lines expand
// into concrete set_price events at parse time, so a scenario plus a seed
// fully determines every event before the engine runs.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdpsim/fixed_point.hpp"

namespace cdpsim {

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

enum class EventKind {
  kFaucet,
  kSetPrice,
  kOpenVault,
  kDeposit,
  kGenerate,
  kRepay,
  kWithdraw,
  kClose,
  kDsrDeposit,
  kDsrWithdraw,
  kPropose,
  kVote,
  kTally,
  kTriggerShutdown,
  kWithdrawExcess,
  kRedeem,
  kFundKeeper,
  kScanAndLiquidate,
  kCheckpoint,
  kBuyAndBurn,
};

struct ScenarioEvent {
  int64_t t = 0;
  int64_t seq = 0;
  EventKind kind = EventKind::kCheckpoint;
  std::string op;
  nlohmann::json args;
  size_t line = 0;
};

namespace detail {

inline EventKind event_kind_from(const std::string& op, size_t line) {
  if (op == "faucet") return EventKind::kFaucet;
  if (op == "set_price") return EventKind::kSetPrice;
  if (op == "open_vault") return EventKind::kOpenVault;
  if (op == "deposit") return EventKind::kDeposit;
  if (op == "generate") return EventKind::kGenerate;
  if (op == "repay") return EventKind::kRepay;
  if (op == "withdraw") return EventKind::kWithdraw;
  if (op == "close") return EventKind::kClose;
  if (op == "dsr_deposit") return EventKind::kDsrDeposit;
  if (op == "dsr_withdraw") return EventKind::kDsrWithdraw;
  if (op == "propose") return EventKind::kPropose;
  if (op == "vote") return EventKind::kVote;
  if (op == "tally") return EventKind::kTally;
  if (op == "trigger_shutdown") return EventKind::kTriggerShutdown;
  if (op == "withdraw_excess") return EventKind::kWithdrawExcess;
  if (op == "redeem") return EventKind::kRedeem;
  if (op == "fund_keeper") return EventKind::kFundKeeper;
  if (op == "scan_and_liquidate") return EventKind::kScanAndLiquidate;
  if (op == "checkpoint") return EventKind::kCheckpoint;
  if (op == "buy_and_burn") return EventKind::kBuyAndBurn;
  throw ScenarioParseError(line, "unknown op '" + op + "'");
}

// Field checkers: every op's args are validated at parse time so event
// application never sees malformed input.

inline void expect_keys(const nlohmann::json& args, std::vector<std::string> required,
                        std::vector<std::string> optional, size_t line) {
  for (const auto& key : required) {
    if (!args.contains(key)) {
      throw ScenarioParseError(line, "missing required arg '" + key + "'");
    }
  }
  for (auto it = args.begin(); it != args.end(); ++it) {
    const std::string& key = it.key();
    if (std::find(required.begin(), required.end(), key) == required.end() &&
        std::find(optional.begin(), optional.end(), key) == optional.end()) {
      throw ScenarioParseError(line, "unexpected arg '" + key + "'");
    }
  }
}

inline std::string arg_string(const nlohmann::json& args, const std::string& key, size_t line) {
  if (!args.at(key).is_string()) {
    throw ScenarioParseError(line, "arg '" + key + "' must be a string");
  }
  return args.at(key).get<std::string>();
}

inline Wad arg_wad(const nlohmann::json& args, const std::string& key, size_t line) {
  try {
    return wad_from_string(arg_string(args, key, line));
  } catch (const NumericError& e) {
    throw ScenarioParseError(line, "arg '" + key + "': " + e.what());
  }
}

inline int64_t arg_int(const nlohmann::json& args, const std::string& key, size_t line) {
  if (!args.at(key).is_number_integer()) {
    throw ScenarioParseError(line, "arg '" + key + "' must be an integer");
  }
  return args.at(key).get<int64_t>();
}

inline uint64_t arg_uint(const nlohmann::json& args, const std::string& key, size_t line) {
  int64_t v = arg_int(args, key, line);
  if (v < 0) throw ScenarioParseError(line, "arg '" + key + "' must be non-negative");
  return static_cast<uint64_t>(v);
}

// Signed wad-scale decimal for walk drift parameters.
inline std::pair<bool, Wad> arg_signed_wad(const nlohmann::json& args, const std::string& key,
                                           size_t line) {
  std::string s = arg_string(args, key, line);
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.erase(s.begin());
  }
  try {
    return {negative, wad_from_string(s)};
  } catch (const NumericError& e) {
    throw ScenarioParseError(line, "arg '" + key + "': " + e.what());
  }
}

inline void validate_event_args(EventKind kind, const nlohmann::json& args, size_t line) {
  switch (kind) {
    case EventKind::kFaucet:
      expect_keys(args, {"account", "asset", "amount"}, {}, line);
      arg_string(args, "account", line);
      arg_string(args, "asset", line);
      arg_wad(args, "amount", line);
      break;
    case EventKind::kSetPrice:
      expect_keys(args, {"symbol", "price"}, {}, line);
      arg_string(args, "symbol", line);
      arg_wad(args, "price", line);
      break;
    case EventKind::kOpenVault:
      expect_keys(args, {"owner", "collateral"}, {}, line);
      arg_string(args, "owner", line);
      arg_string(args, "collateral", line);
      break;
    case EventKind::kDeposit:
    case EventKind::kGenerate:
    case EventKind::kRepay:
    case EventKind::kWithdraw:
      expect_keys(args, {"account", "vault", "amount"}, {}, line);
      arg_string(args, "account", line);
      arg_uint(args, "vault", line);
      arg_wad(args, "amount", line);
      break;
    case EventKind::kClose:
    case EventKind::kWithdrawExcess:
      expect_keys(args, {"account", "vault"}, {}, line);
      arg_string(args, "account", line);
      arg_uint(args, "vault", line);
      break;
    case EventKind::kDsrDeposit:
    case EventKind::kDsrWithdraw:
    case EventKind::kRedeem:
      expect_keys(args, {"account", "amount"}, {}, line);
      arg_string(args, "account", line);
      arg_wad(args, "amount", line);
      break;
    case EventKind::kPropose: {
      expect_keys(args, {"param", "deadline"},
                  {"collateral", "value", "new_collateral"}, line);
      std::string param = arg_string(args, "param", line);
      arg_int(args, "deadline", line);
      if (param == "liquidation_ratio" || param == "stability_rate" ||
          param == "liquidation_penalty") {
        if (!args.contains("collateral") || !args.contains("value")) {
          throw ScenarioParseError(line, "'" + param + "' needs collateral and value");
        }
        arg_string(args, "collateral", line);
        arg_wad(args, "value", line);
      } else if (param == "dsr_rate") {
        if (!args.contains("value")) {
          throw ScenarioParseError(line, "'dsr_rate' needs value");
        }
        arg_wad(args, "value", line);
      } else if (param == "debt_ceiling") {
        if (!args.contains("collateral") || !args.contains("value")) {
          throw ScenarioParseError(line, "'debt_ceiling' needs collateral and value");
        }
        arg_string(args, "collateral", line);
        if (!args.at("value").is_null()) arg_wad(args, "value", line);
      } else if (param == "add_collateral_type") {
        if (!args.contains("new_collateral") || !args.at("new_collateral").is_object()) {
          throw ScenarioParseError(line, "'add_collateral_type' needs a new_collateral object");
        }
        const auto& nc = args.at("new_collateral");
        expect_keys(nc, {"id", "liquidation_ratio", "stability_fee_annual"},
                    {"debt_ceiling", "liquidation_penalty"}, line);
        arg_string(nc, "id", line);
        arg_wad(nc, "liquidation_ratio", line);
        arg_wad(nc, "stability_fee_annual", line);
        if (nc.contains("debt_ceiling") && !nc.at("debt_ceiling").is_null()) {
          arg_wad(nc, "debt_ceiling", line);
        }
        if (nc.contains("liquidation_penalty")) arg_wad(nc, "liquidation_penalty", line);
      } else if (param == "trigger_shutdown") {
        // no extra args
      } else {
        throw ScenarioParseError(line, "unknown proposal param '" + param + "'");
      }
      break;
    }
    case EventKind::kVote:
      expect_keys(args, {"proposal", "account"}, {}, line);
      arg_uint(args, "proposal", line);
      arg_string(args, "account", line);
      break;
    case EventKind::kTally:
      expect_keys(args, {"proposal"}, {}, line);
      arg_uint(args, "proposal", line);
      break;
    case EventKind::kTriggerShutdown:
      expect_keys(args, {}, {"reason"}, line);
      if (args.contains("reason")) arg_string(args, "reason", line);
      break;
    case EventKind::kFundKeeper:
      expect_keys(args, {"token", "amount"}, {}, line);
      if (arg_string(args, "token", line) != "DAI" && arg_string(args, "token", line) != "MKR") {
        throw ScenarioParseError(line, "fund_keeper token must be DAI or MKR");
      }
      arg_wad(args, "amount", line);
      break;
    case EventKind::kScanAndLiquidate:
    case EventKind::kCheckpoint:
    case EventKind::kBuyAndBurn:
      expect_keys(args, {}, {}, line);
      break;
  }
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Geometric walk in pure fixed point: each step multiplies the price by
// 1 + drift + vol * z, with z an Irwin-Hall(12) approximate standard
// normal built from integer draws. mt19937_64 output is fully specified
// by the standard, so expansion is identical on every platform.
inline std::vector<std::pair<int64_t, Wad>> expand_walk(int64_t t0, int64_t step_dt,
                                                        uint64_t steps, Wad start,
                                                        bool drift_neg, Wad drift, Wad vol,
                                                        uint64_t seed, size_t line) {
  using i128 = __int128;
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int64_t, Wad>> out;
  out.reserve(steps + 1);
  out.emplace_back(t0, start);
  i128 price = static_cast<i128>(start.raw);
  const i128 wad = static_cast<i128>(WAD);
  const i128 lo_factor = wad / 100;    // 0.01
  const i128 hi_factor = wad * 100;    // 100.0
  for (uint64_t i = 1; i <= steps; ++i) {
    i128 sum = 0;
    for (int k = 0; k < 12; ++k) sum += static_cast<i128>(rng() % WAD);
    i128 z = sum - 6 * wad;  // ~N(0,1) at wad scale
    i128 shock = static_cast<i128>(vol.raw) * z / wad;
    i128 factor = wad + shock + (drift_neg ? -static_cast<i128>(drift.raw)
                                           : static_cast<i128>(drift.raw));
    if (factor < lo_factor) factor = lo_factor;
    if (factor > hi_factor) factor = hi_factor;
    u256 next = u256(static_cast<u128>(price)) * static_cast<u128>(factor) / WAD;
    if (next > u256(U128_MAX)) throw ScenarioParseError(line, "walk price overflow");
    price = static_cast<i128>(static_cast<u128>(next));
    if (price < 1) price = 1;  // prices stay strictly positive
    out.emplace_back(t0 + static_cast<int64_t>(i) * step_dt, Wad{static_cast<u128>(price)});
  }
  return out;
}

}  // namespace detail

// Parses scenario text. `global_seed` feeds price walks that carry no
// explicit seed (mixed with the walk's (t, seq) so two walks differ).
inline std::vector<ScenarioEvent> parse_scenario(const std::string& text, uint64_t global_seed) {
  std::vector<ScenarioEvent> events;
  std::istringstream in(text);
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    size_t first = raw.find_first_not_of(" \t");
    if (first == std::string::npos || raw[first] == '#') continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ScenarioParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ScenarioParseError(line_no, "event must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key != "t" && key != "seq" && key != "op" && key != "args") {
        throw ScenarioParseError(line_no, "unexpected key '" + key + "'");
      }
    }
    if (!j.contains("t") || !j.at("t").is_number_integer()) {
      throw ScenarioParseError(line_no, "'t' must be an integer");
    }
    if (!j.contains("seq") || !j.at("seq").is_number_integer()) {
      throw ScenarioParseError(line_no, "'seq' must be an integer");
    }
    if (!j.contains("op") || !j.at("op").is_string()) {
      throw ScenarioParseError(line_no, "'op' must be a string");
    }
    int64_t t = j.at("t").get<int64_t>();
    int64_t seq = j.at("seq").get<int64_t>();
    if (t < 0) throw ScenarioParseError(line_no, "'t' must be non-negative");
    nlohmann::json args = j.contains("args") ? j.at("args") : nlohmann::json::object();
    if (!args.is_object()) throw ScenarioParseError(line_no, "'args' must be an object");
    std::string op = j.at("op").get<std::string>();

    if (op == "random_walk_prices") {
      detail::expect_keys(args, {"symbol", "start", "steps", "drift", "vol"},
                          {"seed", "step_dt"}, line_no);
      std::string symbol = detail::arg_string(args, "symbol", line_no);
      Wad start = detail::arg_wad(args, "start", line_no);
      if (start.raw == 0) throw ScenarioParseError(line_no, "walk start must be > 0");
      uint64_t steps = detail::arg_uint(args, "steps", line_no);
      auto [drift_neg, drift] = detail::arg_signed_wad(args, "drift", line_no);
      Wad vol = detail::arg_wad(args, "vol", line_no);
      // per-step rates beyond +-1000% are nonsense and would overflow the
      // shock product
      if (drift > Wad{10 * WAD}) throw ScenarioParseError(line_no, "drift magnitude above 10.0");
      if (vol > Wad{10 * WAD}) throw ScenarioParseError(line_no, "vol above 10.0");
      int64_t step_dt =
          args.contains("step_dt") ? detail::arg_int(args, "step_dt", line_no) : 3600;
      if (step_dt <= 0) throw ScenarioParseError(line_no, "step_dt must be positive");
      uint64_t seed = args.contains("seed")
                          ? detail::arg_uint(args, "seed", line_no)
                          : detail::splitmix64(global_seed ^
                                               detail::splitmix64(static_cast<uint64_t>(t)) ^
                                               detail::splitmix64(static_cast<uint64_t>(seq) +
                                                                  0x632be59bd9b4e019ULL));
      auto points =
          detail::expand_walk(t, step_dt, steps, start, drift_neg, drift, vol, seed, line_no);
      for (const auto& [pt, price] : points) {
        ScenarioEvent ev;
        ev.t = pt;
        ev.seq = seq;
        ev.kind = EventKind::kSetPrice;
        ev.op = "set_price";
        ev.args = {{"symbol", symbol}, {"price", to_string(price)}};
        ev.line = line_no;
        events.push_back(std::move(ev));
      }
      continue;
    }

    ScenarioEvent ev;
    ev.t = t;
    ev.seq = seq;
    ev.kind = detail::event_kind_from(op, line_no);
    ev.op = op;
    ev.args = std::move(args);
    ev.line = line_no;
    detail::validate_event_args(ev.kind, ev.args, line_no);
    events.push_back(std::move(ev));
  }

  std::stable_sort(events.begin(), events.end(), [](const ScenarioEvent& a, const ScenarioEvent& b) {
    return a.t != b.t ? a.t < b.t : a.seq < b.seq;
  });
  for (size_t i = 1; i < events.size(); ++i) {
    if (events[i].t == events[i - 1].t && events[i].seq == events[i - 1].seq) {
      throw ScenarioParseError(events[i].line,
                               "duplicate (t=" + std::to_string(events[i].t) +
                                   ", seq=" + std::to_string(events[i].seq) +
                                   "), first used at line " + std::to_string(events[i - 1].line));
    }
  }
  return events;
}

}  // namespace cdpsim
