#include "ipfsmon/core/trace.hpp"

#include <cmath>
#include <stdexcept>

namespace ipfsmon {

TimeNs seconds_to_ns(double seconds) { return static_cast<TimeNs>(std::llround(seconds * 1e9)); }

std::string_view to_token(RequestType t) {
  switch (t) {
    case RequestType::WantHave:
      return "want_have";
    case RequestType::WantBlock:
      return "want_block";
    case RequestType::Cancel:
      return "cancel";
  }
  return "?";
}

RequestType parse_request_type(std::string_view token) {
  if (token == "want_have") return RequestType::WantHave;
  if (token == "want_block") return RequestType::WantBlock;
  if (token == "cancel") return RequestType::Cancel;
  throw std::invalid_argument("unknown request_type '" + std::string(token) + "'");
}

std::string_view to_token(ConnKind k) { return k == ConnKind::Connect ? "connect" : "disconnect"; }

ConnKind parse_conn_kind(std::string_view token) {
  if (token == "connect") return ConnKind::Connect;
  if (token == "disconnect") return ConnKind::Disconnect;
  throw std::invalid_argument("unknown connection event kind '" + std::string(token) + "'");
}

}  // namespace ipfsmon
