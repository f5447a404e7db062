// Engine configuration: collateral types with annually-quoted rates,
// auction and governance knobs. Loaded from a JSON file; every numeric
// field is a decimal string so configs stay exact.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdpsim/collateral.hpp"
#include "cdpsim/errors.hpp"
#include "cdpsim/fixed_point.hpp"

namespace cdpsim {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CollateralConfig {
  Symbol id;
  Wad liquidation_ratio{WAD + WAD / 2};
  Wad stability_fee_annual{};
  std::optional<Wad> debt_ceiling;           // absent = unlimited
  Wad liquidation_penalty{WAD * 13 / 100};
  std::optional<Wad> initial_price;
};

struct SimConfig {
  std::vector<CollateralConfig> collateral_types;
  Wad dsr_annual{};
  Wad auction_discount{WAD * 3 / 100};
  Wad voting_reward_mkr{WAD / 100};          // minted per vote cast
  Wad approval_threshold{WAD / 2};           // pass iff yes > threshold * supply
  Wad surplus_buffer_floor{};
  std::optional<Wad> mkr_initial_price;

  void validate() const {
    if (collateral_types.empty()) {
      throw ConfigError("config: at least one collateral type required");
    }
    for (const auto& ct : collateral_types) {
      if (ct.id.empty()) throw ConfigError("config: collateral id must be non-empty");
      if (ct.id == "MKR" || ct.id == "DAI") {
        throw ConfigError("config: collateral id '" + ct.id + "' is reserved");
      }
      if (ct.liquidation_ratio < WAD_ONE) {
        throw ConfigError("config: liquidation_ratio for " + ct.id + " must be >= 1.0");
      }
      if (ct.liquidation_penalty >= WAD_ONE) {
        throw ConfigError("config: liquidation_penalty for " + ct.id + " must be < 1.0");
      }
    }
    for (size_t i = 0; i < collateral_types.size(); ++i) {
      for (size_t j = i + 1; j < collateral_types.size(); ++j) {
        if (collateral_types[i].id == collateral_types[j].id) {
          throw ConfigError("config: duplicate collateral id " + collateral_types[i].id);
        }
      }
    }
    if (auction_discount >= WAD_ONE) {
      throw ConfigError("config: auction_discount must be < 1.0");
    }
    if (approval_threshold >= WAD_ONE) {
      throw ConfigError("config: approval_threshold must be < 1.0");
    }
  }
};

namespace detail {

inline Wad config_wad(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_string()) {
    throw ConfigError("config: field '" + key + "' must be a decimal string");
  }
  try {
    return wad_from_string(j.at(key).get<std::string>());
  } catch (const NumericError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace detail

inline SimConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  SimConfig cfg;
  if (!j.contains("collateral_types") || !j.at("collateral_types").is_array()) {
    throw ConfigError("config: 'collateral_types' array required");
  }
  for (const auto& cj : j.at("collateral_types")) {
    CollateralConfig ct;
    if (!cj.contains("id") || !cj.at("id").is_string()) {
      throw ConfigError("config: collateral entry needs string 'id'");
    }
    ct.id = cj.at("id").get<std::string>();
    if (cj.contains("liquidation_ratio")) ct.liquidation_ratio = detail::config_wad(cj, "liquidation_ratio");
    if (cj.contains("stability_fee_annual")) ct.stability_fee_annual = detail::config_wad(cj, "stability_fee_annual");
    if (cj.contains("debt_ceiling")) ct.debt_ceiling = detail::config_wad(cj, "debt_ceiling");
    if (cj.contains("liquidation_penalty")) ct.liquidation_penalty = detail::config_wad(cj, "liquidation_penalty");
    if (cj.contains("initial_price")) ct.initial_price = detail::config_wad(cj, "initial_price");
    cfg.collateral_types.push_back(std::move(ct));
  }
  if (j.contains("dsr_annual")) cfg.dsr_annual = detail::config_wad(j, "dsr_annual");
  if (j.contains("auction_discount")) cfg.auction_discount = detail::config_wad(j, "auction_discount");
  if (j.contains("voting_reward_mkr")) cfg.voting_reward_mkr = detail::config_wad(j, "voting_reward_mkr");
  if (j.contains("approval_threshold")) cfg.approval_threshold = detail::config_wad(j, "approval_threshold");
  if (j.contains("surplus_buffer_floor")) cfg.surplus_buffer_floor = detail::config_wad(j, "surplus_buffer_floor");
  if (j.contains("mkr_initial_price")) cfg.mkr_initial_price = detail::config_wad(j, "mkr_initial_price");
  cfg.validate();
  return cfg;
}

inline SimConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace cdpsim
