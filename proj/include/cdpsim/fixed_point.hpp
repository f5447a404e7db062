// Fixed-point arithmetic for the protocol engine.
//
// Two scales, both unsigned:
//   wad  - 18 decimals, token amounts / USD values / ratios
//   ray  - 27 decimals, per-second rate factors and accumulators
//
// Storage is unsigned 128-bit; working products go through 256-bit
// intermediates so nothing silently wraps. All multiplications and
// divisions round toward zero unless the name says otherwise.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cdpsim {

using u128 = unsigned __int128;
using u256 = boost::multiprecision::uint256_t;

inline constexpr u128 U128_MAX = ~u128{0};
inline constexpr u128 WAD = u128{1000000000ULL} * 1000000000ULL;         // 1e18
inline constexpr u128 RAY = WAD * 1000000000ULL;                         // 1e27
inline constexpr u128 WAD_TO_RAY = 1000000000ULL;                        // 1e9
inline constexpr int64_t SECONDS_PER_YEAR = 31536000;                    // 365 days

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Token amounts, prices, ratios. 18 decimals.
struct Wad {
  u128 raw = 0;
  constexpr Wad() = default;
  constexpr explicit Wad(u128 r) : raw(r) {}
  friend constexpr bool operator==(Wad a, Wad b) { return a.raw == b.raw; }
  friend constexpr auto operator<=>(Wad a, Wad b) { return a.raw <=> b.raw; }
};

// Rate factors and accumulators. 27 decimals.
struct Ray {
  u128 raw = 0;
  constexpr Ray() = default;
  constexpr explicit Ray(u128 r) : raw(r) {}
  friend constexpr bool operator==(Ray a, Ray b) { return a.raw == b.raw; }
  friend constexpr auto operator<=>(Ray a, Ray b) { return a.raw <=> b.raw; }
};

inline constexpr Wad WAD_ONE{WAD};
inline constexpr Ray RAY_ONE{RAY};

namespace detail {

inline u128 checked_narrow(const u256& v, const char* op) {
  if (v > u256(U128_MAX)) throw NumericError(std::string(op) + ": overflow");
  return static_cast<u128>(v);
}

inline u128 mul_div_floor(u128 a, u128 b, u128 den, const char* op) {
  u256 p = u256(a) * b;
  return checked_narrow(p / den, op);
}

inline u128 mul_div_ceil(u128 a, u128 b, u128 den, const char* op) {
  u256 p = u256(a) * b;
  return checked_narrow((p + den - 1) / den, op);
}

}  // namespace detail

inline Wad checked_add(Wad a, Wad b) {
  u128 s = a.raw + b.raw;
  if (s < a.raw) throw NumericError("wad add: overflow");
  return Wad{s};
}

inline Wad checked_sub(Wad a, Wad b) {
  if (b.raw > a.raw) throw NumericError("wad sub: underflow");
  return Wad{a.raw - b.raw};
}

inline Wad operator+(Wad a, Wad b) { return checked_add(a, b); }
inline Wad operator-(Wad a, Wad b) { return checked_sub(a, b); }
inline Wad& operator+=(Wad& a, Wad b) { return a = a + b; }
inline Wad& operator-=(Wad& a, Wad b) { return a = a - b; }

// floor(a * b / 1e18)
inline Wad wad_mul(Wad a, Wad b) {
  return Wad{detail::mul_div_floor(a.raw, b.raw, WAD, "wad_mul")};
}

// floor(a * 1e18 / b)
inline Wad wad_div(Wad a, Wad b) {
  if (b.raw == 0) throw NumericError("wad_div: divide by zero");
  return Wad{detail::mul_div_floor(a.raw, WAD, b.raw, "wad_div")};
}

// floor(a * b / 1e27)
inline Ray ray_mul(Ray a, Ray b) {
  return Ray{detail::mul_div_floor(a.raw, b.raw, RAY, "ray_mul")};
}

// wad x ray -> wad, floor
inline Wad wad_ray_mul(Wad a, Ray r) {
  return Wad{detail::mul_div_floor(a.raw, r.raw, RAY, "wad_ray_mul")};
}

// wad x ray -> wad, ceil
inline Wad wad_ray_mul_up(Wad a, Ray r) {
  return Wad{detail::mul_div_ceil(a.raw, r.raw, RAY, "wad_ray_mul_up")};
}

// wad / ray -> wad, floor
inline Wad wad_ray_div(Wad a, Ray r) {
  if (r.raw == 0) throw NumericError("wad_ray_div: divide by zero");
  return Wad{detail::mul_div_floor(a.raw, RAY, r.raw, "wad_ray_div")};
}

// wad / ray -> wad, ceil
inline Wad wad_ray_div_up(Wad a, Ray r) {
  if (r.raw == 0) throw NumericError("wad_ray_div_up: divide by zero");
  return Wad{detail::mul_div_ceil(a.raw, RAY, r.raw, "wad_ray_div_up")};
}

inline Ray wad_to_ray(Wad a) {
  u128 lim = U128_MAX / WAD_TO_RAY;
  if (a.raw > lim) throw NumericError("wad_to_ray: overflow");
  return Ray{a.raw * WAD_TO_RAY};
}

inline Wad ray_to_wad(Ray r) { return Wad{r.raw / WAD_TO_RAY}; }

// r^n by exponentiation-by-squaring, floor at each step.
inline Ray ray_pow(Ray r, uint64_t n) {
  u128 result = RAY;
  u128 base = r.raw;
  while (n != 0) {
    if (n & 1) result = detail::mul_div_floor(result, base, RAY, "ray_pow");
    n >>= 1;
    if (n != 0) base = detail::mul_div_floor(base, base, RAY, "ray_pow");
  }
  return Ray{result};
}

namespace detail {

// r^n <= cap, with early exit once any intermediate proves the power larger.
// Only valid for r >= 1 ray (powers are monotone in the multiply count then).
inline bool ray_pow_le(Ray r, uint64_t n, Ray cap) {
  if (r.raw <= RAY) return true;
  u256 result = RAY;
  u256 base = r.raw;
  u256 lim = cap.raw;
  while (n != 0) {
    if (n & 1) {
      result = result * base / RAY;
      if (result > lim) return false;
    }
    n >>= 1;
    if (n != 0) {
      base = base * base / RAY;
      if (base > lim) {
        // a higher bit is still pending, so the final power includes a
        // factor >= base already above cap
        return false;
      }
    }
  }
  return result <= lim;
}

}  // namespace detail

// Per-second rate factor r with r^SECONDS_PER_YEAR ~= 1 + annual_rate,
// found by binary search on the ray grid (largest r whose year-power does
// not exceed the target).
inline Ray annual_to_per_second(Wad annual_rate) {
  if (annual_rate.raw == 0) return RAY_ONE;
  Ray target = wad_to_ray(WAD_ONE + annual_rate);
  u128 lo = RAY;
  u128 hi = target.raw;  // r <= 1 + annual for any horizon >= 1s
  while (lo < hi) {
    u128 mid = lo + (hi - lo + 1) / 2;
    if (detail::ray_pow_le(Ray{mid}, SECONDS_PER_YEAR, target)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return Ray{lo};
}

// ---------------------------------------------------------------------------
// Decimal strings. Fixed formats: wad prints 18 fractional digits, ray 27.
// ---------------------------------------------------------------------------

inline std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {out.rbegin(), out.rend()};
}

namespace detail {

inline u128 parse_fixed(std::string_view s, int decimals, const char* what) {
  auto fail = [&](const char* why) {
    throw NumericError(std::string(what) + " '" + std::string(s) + "': " + why);
  };
  if (s.empty()) fail("empty");
  size_t dot = s.find('.');
  std::string_view int_part = (dot == std::string_view::npos) ? s : s.substr(0, dot);
  std::string_view frac_part = (dot == std::string_view::npos) ? std::string_view{} : s.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) fail("no digits");
  if (frac_part.size() > static_cast<size_t>(decimals)) fail("too many fractional digits");
  u256 acc = 0;
  for (char c : int_part) {
    if (c < '0' || c > '9') fail("invalid character");
    acc = acc * 10 + (c - '0');
  }
  for (char c : frac_part) {
    if (c < '0' || c > '9') fail("invalid character");
    acc = acc * 10 + (c - '0');
  }
  for (size_t i = frac_part.size(); i < static_cast<size_t>(decimals); ++i) acc *= 10;
  if (acc > u256(U128_MAX)) fail("out of range");
  return static_cast<u128>(acc);
}

inline std::string format_fixed(u128 v, int decimals) {
  u128 scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  std::string frac = u128_to_string(v % scale);
  std::string pad(static_cast<size_t>(decimals) - frac.size(), '0');
  return u128_to_string(v / scale) + "." + pad + frac;
}

}  // namespace detail

inline Wad wad_from_string(std::string_view s) {
  return Wad{detail::parse_fixed(s, 18, "wad")};
}

inline Ray ray_from_string(std::string_view s) {
  return Ray{detail::parse_fixed(s, 27, "ray")};
}

inline std::string to_string(Wad w) { return detail::format_fixed(w.raw, 18); }
inline std::string to_string(Ray r) { return detail::format_fixed(r.raw, 27); }

}  // namespace cdpsim
