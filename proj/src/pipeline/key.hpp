#pragma once

#include <functional>
#include <string>

#include "ipfsmon/core/trace.hpp"

namespace ipfsmon::pipeline::detail {

struct Key {
  NodeId peer;
  RequestType type;
  Cid cid;

  friend bool operator==(const Key&, const Key&) = default;
};

inline Key key_of(const TraceRecord& r) { return {r.peer, r.request_type, r.cid}; }

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    return NodeIdHash{}(k.peer) ^ (CidHash{}(k.cid) * 31) ^ static_cast<std::size_t>(k.type);
  }
};

struct MonitorKey {
  std::string monitor;
  Key key;

  friend bool operator==(const MonitorKey&, const MonitorKey&) = default;
};

struct MonitorKeyHash {
  std::size_t operator()(const MonitorKey& k) const noexcept {
    return KeyHash{}(k.key) ^ std::hash<std::string>{}(k.monitor);
  }
};

}  // namespace ipfsmon::pipeline::detail
