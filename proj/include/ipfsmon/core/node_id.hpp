#pragma once

#include <random>
#include <string>
#include <string_view>

#include "ipfsmon/core/u256.hpp"

namespace ipfsmon {

/// Overlay identifier of a node. Generated ids are uniform on [0, 2^256).
class NodeId {
 public:
  constexpr NodeId() = default;
  constexpr explicit NodeId(const U256& value) : value_(value) {}

  template <class Rng>
  static NodeId random(Rng& rng) {
    std::uniform_int_distribution<std::uint64_t> word;
    U256 v;
    for (auto& w : v.words) w = word(rng);
    return NodeId(v);
  }

  static NodeId from_hex(std::string_view hex) { return NodeId(U256::from_hex(hex)); }

  const U256& value() const { return value_; }

  /// Normalized position id / 2^256 in [0, 1).
  double position() const { return value_.fraction(); }

  std::string to_hex() const { return value_.to_hex(); }

  /// Kademlia distance to another id.
  U256 distance(const NodeId& other) const { return value_ ^ other.value_; }

  friend constexpr bool operator==(const NodeId&, const NodeId&) = default;
  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;

 private:
  U256 value_{};
};

struct NodeIdHash {
  std::size_t operator()(const NodeId& id) const noexcept { return U256Hash{}(id.value()); }
};

}  // namespace ipfsmon
