#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace ipfsmon {

// Unsigned 256-bit integer, most significant word first.
struct U256 {
  std::array<std::uint64_t, 4> words{};

  friend constexpr bool operator==(const U256&, const U256&) = default;
  friend constexpr auto operator<=>(const U256&, const U256&) = default;

  friend constexpr U256 operator^(const U256& a, const U256& b) {
    U256 r;
    for (std::size_t i = 0; i < 4; ++i) r.words[i] = a.words[i] ^ b.words[i];
    return r;
  }

  static constexpr U256 max() {
    return U256{{~0ULL, ~0ULL, ~0ULL, ~0ULL}};
  }

  // value / 2^256, in [0, 1).
  double fraction() const;

  // 64 lowercase hex characters.
  std::string to_hex() const;
  static U256 from_hex(std::string_view hex);  // throws std::invalid_argument
  static U256 from_bytes(const std::uint8_t* bytes);  // 32 bytes, big endian
};

struct U256Hash {
  std::size_t operator()(const U256& v) const noexcept {
    std::uint64_t h = v.words[0];
    h ^= v.words[1] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= v.words[2] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= v.words[3] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace ipfsmon
