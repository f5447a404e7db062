// TVL time-series analytics: CSV ingestion, peak / trough-after-peak /
// max-drawdown extraction, and the market-cap over TVL health ratio.
#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdpsim/fixed_point.hpp"

namespace cdpsim {

class MetricsError : public std::runtime_error {
 public:
  explicit MetricsError(const std::string& what) : std::runtime_error(what) {}
};

struct TvlPoint {
  std::string date;   // ISO-8601 calendar date, e.g. "2022-05-24"
  int64_t day = 0;    // days since 1970-01-01, for ordering checks
  Wad tvl_usd{};
};

namespace detail {

// Days from civil date (Howard Hinnant's algorithm); valid across the
// whole proleptic Gregorian range we care about.
inline int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  int64_t era = (y >= 0 ? y : y - 399) / 400;
  unsigned yoe = static_cast<unsigned>(y - era * 400);
  unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline int64_t parse_iso_date(const std::string& s, size_t line_no) {
  auto fail = [&] {
    throw MetricsError("line " + std::to_string(line_no) + ": bad date '" + s +
                       "' (expected YYYY-MM-DD)");
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (s[i] < '0' || s[i] > '9') fail();
  }
  int64_t y = std::stoll(s.substr(0, 4));
  unsigned m = static_cast<unsigned>(std::stoul(s.substr(5, 2)));
  unsigned d = static_cast<unsigned>(std::stoul(s.substr(8, 2)));
  if (m < 1 || m > 12 || d < 1 || d > 31) fail();
  return days_from_civil(y, m, d);
}

}  // namespace detail

// Parses "date,tvl_usd" CSV. Header row required; dates must be strictly
// increasing; TVL values are non-negative decimals.
inline std::vector<TvlPoint> parse_tvl_csv(const std::string& text) {
  std::vector<TvlPoint> out;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "date,tvl_usd") {
        throw MetricsError("line " + std::to_string(line_no) +
                           ": expected header 'date,tvl_usd', got '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw MetricsError("line " + std::to_string(line_no) + ": expected exactly two fields");
    }
    TvlPoint p;
    p.date = line.substr(0, comma);
    p.day = detail::parse_iso_date(p.date, line_no);
    try {
      p.tvl_usd = wad_from_string(line.substr(comma + 1));
    } catch (const NumericError& e) {
      throw MetricsError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!out.empty() && p.day <= out.back().day) {
      throw MetricsError("line " + std::to_string(line_no) + ": dates must strictly increase");
    }
    out.push_back(std::move(p));
  }
  if (!saw_header) throw MetricsError("empty input: missing 'date,tvl_usd' header");
  if (out.empty()) throw MetricsError("no data rows after header");
  return out;
}

struct SeriesStats {
  TvlPoint peak;
  TvlPoint trough_after_peak;
  Wad max_drawdown{};  // fraction of the running peak lost, in [0, 1)
};

// Single pass: track the running maximum and the largest fractional drop
// from any running maximum to a later point. Peak is the global maximum
// (earliest if tied); trough is the minimum at or after it (earliest if
// tied). Drawdown is measured against the running peak, so it can exceed
// the global peak-to-trough drop when an earlier local maximum fell
// harder.
inline SeriesStats series_stats(const std::vector<TvlPoint>& series) {
  if (series.empty()) throw MetricsError("empty series");
  SeriesStats st;
  size_t peak_idx = 0;
  for (size_t i = 1; i < series.size(); ++i) {
    if (series[i].tvl_usd > series[peak_idx].tvl_usd) peak_idx = i;
  }
  st.peak = series[peak_idx];
  size_t trough_idx = peak_idx;
  for (size_t i = peak_idx + 1; i < series.size(); ++i) {
    if (series[i].tvl_usd < series[trough_idx].tvl_usd) trough_idx = i;
  }
  st.trough_after_peak = series[trough_idx];

  Wad running_max = series[0].tvl_usd;
  Wad worst{};
  for (size_t i = 1; i < series.size(); ++i) {
    if (series[i].tvl_usd > running_max) {
      running_max = series[i].tvl_usd;
      continue;
    }
    if (running_max.raw == 0) continue;
    Wad drop = running_max - series[i].tvl_usd;
    Wad frac = wad_div(drop, running_max);
    if (frac > worst) worst = frac;
  }
  st.max_drawdown = worst;
  return st;
}

// Market cap over TVL; a value well above 1 flags collateral thin relative
// to the token's valuation.
inline Wad mcap_tvl_ratio(Wad market_cap, Wad tvl) {
  if (tvl.raw == 0) throw MetricsError("TVL is zero; ratio undefined");
  return wad_div(market_cap, tvl);
}

}  // namespace cdpsim
