#include <algorithm>
#include <map>
#include <utility>

#include "ipfsmon/probes/probes.hpp"

namespace ipfsmon::probes {

std::vector<Interest> idw(std::span<const TraceRecord> records, const Cid& cid) {
  std::map<NodeId, TimeNs> first;
  for (const auto& r : records) {
    if (r.cid != cid || !is_want(r.request_type) || r.flags != 0) continue;
    auto [it, fresh] = first.try_emplace(r.peer, r.timestamp_ns);
    if (!fresh) it->second = std::min(it->second, r.timestamp_ns);
  }
  std::vector<Interest> out;
  for (const auto& [peer, t] : first) out.push_back({peer, t});
  std::stable_sort(out.begin(), out.end(),
                   [](const Interest& a, const Interest& b) { return a.first_seen < b.first_seen; });
  return out;
}

std::vector<NodeWant> tnw(std::span<const TraceRecord> records, const NodeId& target) {
  std::vector<NodeWant> out;
  for (const auto& r : records) {
    if (r.peer == target && r.flags == 0) out.push_back({r.timestamp_ns, r.request_type, r.cid});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const NodeWant& a, const NodeWant& b) { return a.timestamp_ns < b.timestamp_ns; });
  return out;
}

netsim::NodeIndex add_prober(netsim::Network& net) {
  const auto n = net.add_node(netsim::NodeKind::DhtClient);
  net.set_workload(n, false);
  return n;
}

bool tpi(netsim::Network& net, const NodeId& prober, const NodeId& target, const Cid& cid) {
  const auto p = net.find_node(prober);
  const auto t = net.find_node(target);
  if (!p) throw std::invalid_argument("unknown prober " + prober.to_hex());
  if (!t) throw ProbeUnreachable("unknown target " + target.to_hex());
  if (!net.node(*t).online) throw ProbeUnreachable("target " + target.to_hex() + " is offline");
  if (!net.connected(*p, *t)) net.connect(*p, *t, false);
  if (!net.connected(*p, *t)) throw ProbeUnreachable("cannot connect to target " + target.to_hex());

  const auto probe = net.send_probe(*p, *t, cid);
  const TimeNs deadline = net.now() + seconds_to_ns(net.config().block_timeout_s);
  net.run_until(std::min(deadline, net.now() + 2 * net.link_latency(*p, *t)));
  if (!net.probe_answer(probe)) net.run_until(deadline);
  return net.probe_answer(probe).value_or(false);
}

}  // namespace ipfsmon::probes
