#include <algorithm>

#include "ipfsmon/netsim/network.hpp"

namespace ipfsmon::netsim {

nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::json j;
  j["true_n"] = gt.true_n;
  nlohmann::json gw = nlohmann::json::object();
  for (const auto& [dns, ids] : gt.gateway_map) {
    auto& arr = gw[dns] = nlohmann::json::array();
    for (const auto& id : ids) arr.push_back(id.to_hex());
  }
  j["gateway_map"] = gw;

  std::size_t local_hits = 0, gateway_hits = 0, fetched = 0, pending = 0, aborted = 0;
  for (const auto& r : gt.requests_issued) {
    switch (r.status) {
      case RequestStatus::LocalHit:
        ++local_hits;
        break;
      case RequestStatus::GatewayCacheHit:
        ++gateway_hits;
        break;
      case RequestStatus::Fetched:
        ++fetched;
        break;
      case RequestStatus::Pending:
        ++pending;
        break;
      case RequestStatus::Aborted:
        ++aborted;
        break;
    }
  }
  const auto gateway_requests = static_cast<std::size_t>(std::count_if(
      gt.requests_issued.begin(), gt.requests_issued.end(),
      [](const RequestRecord& r) { return r.origin == RequestOrigin::Gateway; }));
  nlohmann::json summary;
  summary["requests_issued"] = gt.requests_issued.size();
  summary["gateway_requests"] = gateway_requests;
  summary["local_hits"] = local_hits;
  summary["gateway_cache_hits"] = gateway_hits;
  summary["fetched"] = fetched;
  summary["pending"] = pending;
  summary["aborted"] = aborted;
  summary["initial_broadcasts"] = gt.initial_broadcasts;
  summary["rebroadcasts"] = gt.rebroadcasts;
  nlohmann::json monitors = nlohmann::json::array();
  for (const auto& m : gt.monitors) {
    monitors.push_back({{"name", m.name},
                        {"peer_id", m.id.to_hex()},
                        {"trace_records", m.trace_records},
                        {"conn_events", m.conn_events},
                        {"want_deliveries", m.want_deliveries},
                        {"rebroadcast_deliveries", m.rebroadcast_deliveries},
                        {"cancel_deliveries", m.cancel_deliveries}});
  }
  summary["monitors"] = monitors;
  j["summary"] = summary;
  return j;
}

}  // namespace ipfsmon::netsim
