#include "ipfsmon/core/u256.hpp"

#include <cmath>
#include <stdexcept>

namespace ipfsmon {

double U256::fraction() const {
  // Words beyond the second cannot affect a double mantissa, but keep them
  // for ids that are tiny (min-distance samples close to zero).
  double r = 0.0;
  for (std::size_t i = 4; i-- > 0;) {
    r = (r + static_cast<double>(words[i])) * 0x1p-64;
  }
  // Rounding of a value just below 2^256 can produce exactly 1.0.
  if (r >= 1.0) r = std::nextafter(1.0, 0.0);
  return r;
}

std::string U256::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(64, '0');
  for (std::size_t i = 0; i < 4; ++i) {
    std::uint64_t w = words[i];
    for (std::size_t j = 0; j < 16; ++j) {
      out[i * 16 + 15 - j] = kDigits[w & 0xf];
      w >>= 4;
    }
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

U256 U256::from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw std::invalid_argument("expected 64 hex characters, got " + std::to_string(hex.size()));
  }
  U256 v;
  for (std::size_t i = 0; i < 4; ++i) {
    std::uint64_t w = 0;
    for (std::size_t j = 0; j < 16; ++j) {
      const int d = hex_value(hex[i * 16 + j]);
      if (d < 0) throw std::invalid_argument("invalid hex character '" + std::string(1, hex[i * 16 + j]) + "'");
      w = (w << 4) | static_cast<std::uint64_t>(d);
    }
    v.words[i] = w;
  }
  return v;
}

U256 U256::from_bytes(const std::uint8_t* bytes) {
  U256 v;
  for (std::size_t i = 0; i < 4; ++i) {
    std::uint64_t w = 0;
    for (std::size_t j = 0; j < 8; ++j) w = (w << 8) | bytes[i * 8 + j];
    v.words[i] = w;
  }
  return v;
}

}  // namespace ipfsmon
