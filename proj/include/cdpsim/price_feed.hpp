// USD reference prices per symbol. Emergency shutdown freezes the feed:
// reads switch to the frozen copy and writes are rejected from then on.
#pragma once

#include <map>
#include <string>

#include "cdpsim/errors.hpp"
#include "cdpsim/fixed_point.hpp"

namespace cdpsim {

using Symbol = std::string;

class PriceFeed {
 public:
  void set_price(const Symbol& symbol, Wad price) {
    if (frozen_) throw EngineError(ErrorCode::kFrozen, "price feed is frozen");
    if (price.raw == 0) throw EngineError(ErrorCode::kPriceInvalid, "price must be > 0");
    prices_[symbol] = price;
  }

  bool has_price(const Symbol& symbol) const {
    const auto& src = frozen_ ? frozen_prices_ : prices_;
    return src.find(symbol) != src.end();
  }

  Wad price(const Symbol& symbol) const {
    const auto& src = frozen_ ? frozen_prices_ : prices_;
    auto it = src.find(symbol);
    if (it == src.end()) {
      throw EngineError(ErrorCode::kPriceInvalid, "no price for " + symbol);
    }
    return it->second;
  }

  void freeze() {
    frozen_prices_ = prices_;
    frozen_ = true;
  }

  bool frozen() const { return frozen_; }
  const std::map<Symbol, Wad>& live_prices() const { return prices_; }
  const std::map<Symbol, Wad>& frozen_prices() const { return frozen_prices_; }

 private:
  std::map<Symbol, Wad> prices_;
  std::map<Symbol, Wad> frozen_prices_;
  bool frozen_ = false;
};

}  // namespace cdpsim
