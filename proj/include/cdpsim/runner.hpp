// Discrete-event driver: advances the clock to each event's timestamp
// (accruing fees and savings), applies the event, audits the full state,
// and emits a deterministic report, snapshot, and state hash. Event-level
// failures are recorded in the report and do not stop the run; audit
// failures mean an engine bug and propagate.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdpsim/engine.hpp"
#include "cdpsim/scenario.hpp"

namespace cdpsim {

struct RunResult {
  nlohmann::json report;
  nlohmann::json snapshot;
  std::string state_hash;
};

namespace detail {

inline nlohmann::json apply_event(Engine& engine, const ScenarioEvent& ev) {
  nlohmann::json result;
  switch (ev.kind) {
    case EventKind::kFaucet: {
      Account account = ev.args.at("account").get<std::string>();
      std::string asset = ev.args.at("asset").get<std::string>();
      Wad amount = wad_from_string(ev.args.at("amount").get<std::string>());
      if (asset == kMkrSymbol) {
        engine.faucet_mkr(account, amount);
      } else {
        engine.faucet_collateral(account, asset, amount);
      }
      break;
    }
    case EventKind::kSetPrice:
      engine.set_price(ev.args.at("symbol").get<std::string>(),
                       wad_from_string(ev.args.at("price").get<std::string>()));
      break;
    case EventKind::kOpenVault:
      result["vault"] = engine.open_vault(ev.args.at("owner").get<std::string>(),
                                          ev.args.at("collateral").get<std::string>());
      break;
    case EventKind::kDeposit:
      engine.deposit_collateral(ev.args.at("account").get<std::string>(),
                                ev.args.at("vault").get<uint64_t>(),
                                wad_from_string(ev.args.at("amount").get<std::string>()));
      break;
    case EventKind::kGenerate:
      engine.generate_dai(ev.args.at("account").get<std::string>(),
                          ev.args.at("vault").get<uint64_t>(),
                          wad_from_string(ev.args.at("amount").get<std::string>()));
      break;
    case EventKind::kRepay: {
      RepayResult r = engine.repay_dai(ev.args.at("account").get<std::string>(),
                                       ev.args.at("vault").get<uint64_t>(),
                                       wad_from_string(ev.args.at("amount").get<std::string>()));
      result["burned"] = to_string(r.amount_burned);
      result["fee_portion"] = to_string(r.fee_portion);
      break;
    }
    case EventKind::kWithdraw:
      engine.withdraw_collateral(ev.args.at("account").get<std::string>(),
                                 ev.args.at("vault").get<uint64_t>(),
                                 wad_from_string(ev.args.at("amount").get<std::string>()));
      break;
    case EventKind::kClose:
      engine.close_vault(ev.args.at("account").get<std::string>(),
                         ev.args.at("vault").get<uint64_t>());
      break;
    case EventKind::kDsrDeposit:
      engine.dsr_deposit(ev.args.at("account").get<std::string>(),
                         wad_from_string(ev.args.at("amount").get<std::string>()));
      break;
    case EventKind::kDsrWithdraw:
      engine.dsr_withdraw(ev.args.at("account").get<std::string>(),
                          wad_from_string(ev.args.at("amount").get<std::string>()));
      break;
    case EventKind::kPropose: {
      Proposal draft;
      std::string param = ev.args.at("param").get<std::string>();
      draft.voting_deadline = ev.args.at("deadline").get<int64_t>();
      if (param == "liquidation_ratio") {
        draft.param = ProposalParam::kLiquidationRatio;
      } else if (param == "stability_rate") {
        draft.param = ProposalParam::kStabilityRate;
      } else if (param == "dsr_rate") {
        draft.param = ProposalParam::kDsrRate;
      } else if (param == "debt_ceiling") {
        draft.param = ProposalParam::kDebtCeiling;
      } else if (param == "liquidation_penalty") {
        draft.param = ProposalParam::kLiquidationPenalty;
      } else if (param == "add_collateral_type") {
        draft.param = ProposalParam::kAddCollateralType;
      } else {
        draft.param = ProposalParam::kTriggerShutdown;
      }
      if (ev.args.contains("collateral")) {
        draft.collateral_id = ev.args.at("collateral").get<std::string>();
      }
      if (draft.param == ProposalParam::kDebtCeiling) {
        if (!ev.args.at("value").is_null()) {
          draft.ceiling_value = wad_from_string(ev.args.at("value").get<std::string>());
        }
      } else if (ev.args.contains("value")) {
        draft.value = wad_from_string(ev.args.at("value").get<std::string>());
      }
      if (draft.param == ProposalParam::kAddCollateralType) {
        const auto& nc = ev.args.at("new_collateral");
        NewCollateralParams params;
        params.id = nc.at("id").get<std::string>();
        params.liquidation_ratio = wad_from_string(nc.at("liquidation_ratio").get<std::string>());
        params.stability_fee_annual =
            wad_from_string(nc.at("stability_fee_annual").get<std::string>());
        if (nc.contains("debt_ceiling") && !nc.at("debt_ceiling").is_null()) {
          params.debt_ceiling = wad_from_string(nc.at("debt_ceiling").get<std::string>());
        }
        if (nc.contains("liquidation_penalty")) {
          params.liquidation_penalty =
              wad_from_string(nc.at("liquidation_penalty").get<std::string>());
        }
        draft.new_collateral = std::move(params);
      }
      result["proposal"] = engine.propose(std::move(draft));
      break;
    }
    case EventKind::kVote:
      engine.vote(ev.args.at("proposal").get<uint64_t>(),
                  ev.args.at("account").get<std::string>());
      break;
    case EventKind::kTally: {
      ProposalOutcome out = engine.tally_and_execute(ev.args.at("proposal").get<uint64_t>());
      result["state"] = proposal_state_name(out.state);
      result["yes_weight"] = to_string(out.yes_weight);
      result["total_supply"] = to_string(out.total_supply);
      if (!out.execution_error.empty()) result["execution_error"] = out.execution_error;
      break;
    }
    case EventKind::kTriggerShutdown:
      engine.trigger_shutdown(ev.args.contains("reason")
                                  ? ev.args.at("reason").get<std::string>()
                                  : "scenario trigger");
      break;
    case EventKind::kWithdrawExcess:
      result["excess"] = to_string(engine.withdraw_excess_collateral(
          ev.args.at("account").get<std::string>(), ev.args.at("vault").get<uint64_t>()));
      break;
    case EventKind::kRedeem: {
      RedeemRecord rec = engine.redeem_dai(ev.args.at("account").get<std::string>(),
                                           wad_from_string(ev.args.at("amount").get<std::string>()));
      result["redeemed"] = to_string(rec.redeemed);
      result["remainder"] = to_string(rec.remainder);
      nlohmann::json basket = nlohmann::json::object();
      for (const auto& [cid, units] : rec.delivered) basket[cid] = to_string(units);
      result["delivered"] = std::move(basket);
      break;
    }
    case EventKind::kFundKeeper: {
      Wad amount = wad_from_string(ev.args.at("amount").get<std::string>());
      if (ev.args.at("token").get<std::string>() == "DAI") {
        engine.fund_keeper_dai(amount);
      } else {
        engine.fund_keeper_mkr(amount);
      }
      break;
    }
    case EventKind::kScanAndLiquidate: {
      nlohmann::json flagged = nlohmann::json::array();
      nlohmann::json errors = nlohmann::json::array();
      nlohmann::json settled = nlohmann::json::array();
      for (VaultId id : engine.scan_unsafe()) {
        flagged.push_back(id);
        try {
          engine.start_liquidation(id);
        } catch (const EngineError& e) {
          errors.push_back({{"vault", id}, {"error", error_code_name(e.code())}});
        }
      }
      // Settle every active auction, including ones left over from a
      // previously underfunded keeper pool.
      std::vector<AuctionId> active;
      for (const auto& [aid, a] : engine.auctions()) {
        if (a.state == AuctionState::kActive) active.push_back(aid);
      }
      for (AuctionId aid : active) {
        try {
          SettlementRecord rec = engine.settle_collateral_auction(aid);
          settled.push_back({{"auction", aid},
                             {"proceeds", to_string(rec.proceeds)},
                             {"refund", to_string(rec.refund)},
                             {"bad_debt", to_string(rec.bad_debt)}});
        } catch (const EngineError& e) {
          errors.push_back({{"auction", aid}, {"error", error_code_name(e.code())}});
        }
      }
      try {
        DebtAuctionRecord rec = engine.run_debt_auction();
        result["debt_auction"] = {{"covered_by_surplus", to_string(rec.covered_by_surplus)},
                                  {"covered_by_keeper", to_string(rec.covered_by_keeper)},
                                  {"mkr_minted", to_string(rec.mkr_minted)},
                                  {"remaining", to_string(rec.remaining_bad_debt)}};
      } catch (const EngineError& e) {
        errors.push_back({{"debt_auction", true}, {"error", error_code_name(e.code())}});
      }
      result["flagged"] = std::move(flagged);
      result["settled"] = std::move(settled);
      if (!errors.empty()) result["errors"] = std::move(errors);
      break;
    }
    case EventKind::kCheckpoint:
      break;
    case EventKind::kBuyAndBurn: {
      BuyBurnRecord rec = engine.buy_and_burn();
      result["dai_spent"] = to_string(rec.dai_spent);
      result["mkr_burned"] = to_string(rec.mkr_burned);
      break;
    }
  }
  return result;
}

}  // namespace detail

// Applies all events in order against a fresh engine. Accrual is driven
// purely by event timestamps, so inserting a checkpoint between two
// events never changes the outcome.
inline RunResult run_scenario(const std::vector<ScenarioEvent>& events, const SimConfig& config,
                              uint64_t seed) {
  Engine engine(config);
  engine.audit();

  nlohmann::json event_log = nlohmann::json::array();
  for (const ScenarioEvent& ev : events) {
    nlohmann::json entry;
    entry["line"] = ev.line;
    entry["t"] = ev.t;
    entry["seq"] = ev.seq;
    entry["op"] = ev.op;
    try {
      engine.advance_time(ev.t);
      nlohmann::json result = detail::apply_event(engine, ev);
      entry["status"] = "ok";
      if (!result.empty()) entry["result"] = std::move(result);
    } catch (const EngineError& e) {
      entry["status"] = "error";
      entry["error"] = error_code_name(e.code());
      entry["message"] = e.what();
    }
    engine.audit();
    event_log.push_back(std::move(entry));
  }

  nlohmann::json settlements = nlohmann::json::array();
  for (const auto& s : engine.settlements()) {
    settlements.push_back({{"auction", s.auction_id},
                           {"vault", s.vault_id},
                           {"collateral", s.collateral_id},
                           {"lot", to_string(s.lot)},
                           {"tab", to_string(s.tab)},
                           {"units_sold", to_string(s.units_sold)},
                           {"proceeds", to_string(s.proceeds)},
                           {"refund", to_string(s.refund)},
                           {"bad_debt", to_string(s.bad_debt)}});
  }
  nlohmann::json debt_auctions = nlohmann::json::array();
  for (const auto& d : engine.debt_auctions()) {
    debt_auctions.push_back({{"covered_by_surplus", to_string(d.covered_by_surplus)},
                             {"covered_by_keeper", to_string(d.covered_by_keeper)},
                             {"mkr_minted", to_string(d.mkr_minted)},
                             {"remaining_bad_debt", to_string(d.remaining_bad_debt)}});
  }
  nlohmann::json buy_burns = nlohmann::json::array();
  for (const auto& b : engine.buy_burns()) {
    buy_burns.push_back(
        {{"dai_spent", to_string(b.dai_spent)}, {"mkr_burned", to_string(b.mkr_burned)}});
  }
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : engine.proposal_outcomes()) {
    outcomes.push_back({{"proposal", o.id},
                        {"yes_weight", to_string(o.yes_weight)},
                        {"total_supply", to_string(o.total_supply)},
                        {"state", proposal_state_name(o.state)}});
  }

  RunResult out;
  out.snapshot = engine.snapshot();
  out.state_hash = hash_json(out.snapshot);
  out.report["seed"] = seed;
  out.report["events"] = std::move(event_log);
  out.report["settlements"] = std::move(settlements);
  out.report["debt_auctions"] = std::move(debt_auctions);
  out.report["buy_burns"] = std::move(buy_burns);
  out.report["proposal_outcomes"] = std::move(outcomes);
  out.report["final"] = {{"clock", engine.now()},
                         {"state_hash", out.state_hash},
                         {"dai_supply", to_string(engine.dai().total_supply())},
                         {"mkr_supply", to_string(engine.mkr().total_supply())},
                         {"collateral_value", to_string(engine.total_collateral_value())},
                         {"tvl", to_string(engine.protocol_tvl())},
                         {"outstanding_system_debt",
                          to_string(engine.outstanding_system_debt())}};
  return out;
}

inline RunResult run_scenario_text(const std::string& scenario_text, const SimConfig& config,
                                   uint64_t seed) {
  return run_scenario(parse_scenario(scenario_text, seed), config, seed);
}

inline bool replay_check(const std::string& scenario_text, const SimConfig& config,
                         uint64_t seed, const std::string& expected_hash) {
  return run_scenario_text(scenario_text, config, seed).state_hash == expected_hash;
}

}  // namespace cdpsim
