#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "ipfsmon/core/u256.hpp"

namespace ipfsmon {

enum class CodecKind : std::uint8_t { DagProtobuf, Raw, DagCBOR, DagJSON, GitRaw, EthereumTx, Other };

/// Multicodec tag of a CID. `code` is meaningful only for CodecKind::Other.
struct Codec {
  CodecKind kind = CodecKind::Raw;
  std::uint64_t code = 0;

  constexpr Codec() = default;
  constexpr Codec(CodecKind k) : kind(k) {}  // NOLINT(implicit)
  static constexpr Codec other(std::uint64_t c) {
    Codec r(CodecKind::Other);
    r.code = c;
    return r;
  }

  friend constexpr bool operator==(const Codec& a, const Codec& b) {
    return a.kind == b.kind && (a.kind != CodecKind::Other || a.code == b.code);
  }
  friend constexpr auto operator<=>(const Codec& a, const Codec& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (a.kind != CodecKind::Other) return std::strong_ordering::equal;
    return a.code <=> b.code;
  }

  /// "DagProtobuf", "Raw", ..., "Other-<decimal code>".
  std::string name() const;
  static Codec parse(std::string_view name);  // throws std::invalid_argument
};

/// Content identifier: codec tag plus a 256-bit digest of the block bytes.
struct Cid {
  Codec codec;
  U256 digest;

  friend constexpr bool operator==(const Cid&, const Cid&) = default;
  friend constexpr auto operator<=>(const Cid&, const Cid&) = default;

  /// "<codec-name>:<64 hex chars>"
  std::string to_string() const;
  static Cid parse(std::string_view text);  // throws std::invalid_argument
};

struct CidHash {
  std::size_t operator()(const Cid& c) const noexcept {
    return U256Hash{}(c.digest) ^ (static_cast<std::size_t>(c.codec.kind) * 0x9e3779b97f4a7c15ULL) ^
           static_cast<std::size_t>(c.codec.code);
  }
};

/// SHA-256 of `bytes`, tagged with `codec`.
Cid hash_content(std::span<const std::uint8_t> bytes, Codec codec);
Cid hash_content(std::string_view bytes, Codec codec);

}  // namespace ipfsmon

namespace ipfsmon {

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace ipfsmon
