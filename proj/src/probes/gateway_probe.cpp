#include <map>
#include <ostream>
#include <utility>

#include "ipfsmon/core/rng.hpp"
#include "ipfsmon/probes/probes.hpp"

namespace ipfsmon::probes {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ';';
    out += s;
  }
  return out;
}

}  // namespace

Cid bait_cid(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xba17));
  std::vector<std::uint8_t> block(256);
  for (std::size_t i = 0; i < block.size(); i += 8) {
    const auto w = i == 0 ? seed : rng();
    for (std::size_t b = 0; b < 8; ++b) block[i + b] = static_cast<std::uint8_t>(w >> (8 * b));
  }
  return hash_content(block, CodecKind::Raw);
}

GatewayProbeResult probe_gateway(netsim::Network& net, const std::string& dns_name, std::span<const NodeId> monitors,
                                 std::uint64_t seed, double window_s) {
  std::vector<netsim::NodeIndex> mons;
  for (const auto& id : monitors) {
    auto n = net.find_node(id);
    if (!n || net.node(*n).kind != netsim::NodeKind::Monitor) {
      throw std::invalid_argument("not a monitor: " + id.to_hex());
    }
    mons.push_back(*n);
  }
  if (mons.empty()) throw std::invalid_argument("gateway probing needs at least one monitor");

  GatewayProbeResult res;
  res.dns_name = dns_name;
  const Cid c = bait_cid(seed);
  res.probe_cids.push_back(c);
  std::vector<std::size_t> offsets;
  for (auto m : mons) {
    net.store_block(m, c);
    net.dht_provide(m, c);
    offsets.push_back(net.trace(m).size());
  }
  const auto rid = net.gateway_http_request(dns_name, c);
  res.probes_sent = 1;
  net.run_for(seconds_to_ns(window_s));

  for (std::size_t i = 0; i < mons.size(); ++i) {
    const auto& tr = net.trace(mons[i]);
    for (std::size_t j = offsets[i]; j < tr.size(); ++j) {
      if (tr[j].cid == c && tr[j].request_type == RequestType::WantHave) res.discovered_node_ids.insert(tr[j].peer);
    }
  }
  const auto status = net.request(rid).status;
  res.http_succeeded.push_back(status == netsim::RequestStatus::Fetched ||
                               status == netsim::RequestStatus::LocalHit ||
                               status == netsim::RequestStatus::GatewayCacheHit);
  return res;
}

GatewayProbeResult saturate_gateway(netsim::Network& net, const std::string& dns_name,
                                    std::span<const NodeId> monitors, std::uint64_t seed, std::size_t rounds,
                                    std::size_t max_probes, double window_s) {
  GatewayProbeResult total;
  total.dns_name = dns_name;
  std::size_t quiet = 0;
  for (std::size_t i = 0; i < max_probes && quiet < rounds; ++i) {
    auto r = probe_gateway(net, dns_name, monitors, derive_seed(seed, i), window_s);
    const auto before = total.discovered_node_ids.size();
    total.discovered_node_ids.insert(r.discovered_node_ids.begin(), r.discovered_node_ids.end());
    total.probe_cids.push_back(r.probe_cids.front());
    total.http_succeeded.push_back(r.http_succeeded.front());
    ++total.probes_sent;
    quiet = total.discovered_node_ids.size() > before ? 0 : quiet + 1;
  }
  return total;
}

std::vector<CrossReferenceRow> cross_reference(std::span<const GatewayProbeResult> results,
                                               std::span<const TraceRecord> observations) {
  std::map<NodeId, std::set<std::string>> addresses;
  std::map<std::string, std::set<NodeId>> hosts;
  for (const auto& r : observations) {
    if (r.address.empty()) continue;
    addresses[r.peer].insert(r.address);
    hosts[r.address].insert(r.peer);
  }
  std::map<NodeId, std::set<std::string>> names;
  for (const auto& res : results) {
    for (const auto& id : res.discovered_node_ids) names[id].insert(res.dns_name);
  }
  std::vector<CrossReferenceRow> rows;
  for (const auto& [id, dns] : names) {
    CrossReferenceRow row;
    row.peer = id;
    row.dns_names.assign(dns.begin(), dns.end());
    if (auto it = addresses.find(id); it != addresses.end()) {
      row.addresses.assign(it->second.begin(), it->second.end());
    }
    row.multi_address = row.addresses.size() > 1;
    for (const auto& a : row.addresses) row.shared_address = row.shared_address || hosts[a].size() > 1;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_cross_reference_csv(std::ostream& out, const std::vector<CrossReferenceRow>& rows) {
  out << "peer_id,addresses,dns_names,multi_address,shared_address\n";
  for (const auto& r : rows) {
    out << r.peer.to_hex() << ',' << join(r.addresses) << ',' << join(r.dns_names) << ','
        << (r.multi_address ? 1 : 0) << ',' << (r.shared_address ? 1 : 0) << '\n';
  }
}

}  // namespace ipfsmon::probes
