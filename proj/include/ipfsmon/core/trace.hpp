#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ipfsmon/core/cid.hpp"
#include "ipfsmon/core/node_id.hpp"

namespace ipfsmon {

/// Nanoseconds since the simulation epoch.
using TimeNs = std::int64_t;

inline constexpr TimeNs kNsPerSecond = 1'000'000'000;

TimeNs seconds_to_ns(double seconds);
inline double ns_to_seconds(TimeNs ns) { return static_cast<double>(ns) / 1e9; }

enum class RequestType : std::uint8_t { WantHave, WantBlock, Cancel };

std::string_view to_token(RequestType t);  // want_have / want_block / cancel
RequestType parse_request_type(std::string_view token);  // throws std::invalid_argument

inline bool is_want(RequestType t) { return t != RequestType::Cancel; }

namespace flags {
inline constexpr std::uint8_t kInterMonitorDuplicate = 1u << 0;
inline constexpr std::uint8_t kRebroadcast = 1u << 1;
}  // namespace flags

/// One want_list entry as observed by a monitor.
struct TraceRecord {
  TimeNs timestamp_ns = 0;
  std::string monitor;
  NodeId peer;
  std::string address;
  RequestType request_type = RequestType::WantHave;
  Cid cid;
  std::uint8_t flags = 0;

  bool is_duplicate() const { return (flags & flags::kInterMonitorDuplicate) != 0; }
  bool is_rebroadcast() const { return (flags & flags::kRebroadcast) != 0; }

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class ConnKind : std::uint8_t { Connect, Disconnect };

std::string_view to_token(ConnKind k);
ConnKind parse_conn_kind(std::string_view token);

struct ConnEvent {
  TimeNs timestamp_ns = 0;
  std::string monitor;
  NodeId peer;
  ConnKind kind = ConnKind::Connect;

  friend bool operator==(const ConnEvent&, const ConnEvent&) = default;
};

}  // namespace ipfsmon
