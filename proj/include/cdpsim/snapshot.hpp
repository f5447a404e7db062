// Canonical snapshot hashing. nlohmann's default json keeps object keys
// sorted, so dump() with no whitespace is already a canonical byte form;
// the state hash is SHA-256 over those bytes.
#pragma once

#include <openssl/evp.h>

#include <array>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace cdpsim {

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

inline std::string canonical_dump(const nlohmann::json& j) { return j.dump(); }

inline std::string hash_json(const nlohmann::json& j) { return sha256_hex(canonical_dump(j)); }

}  // namespace cdpsim
