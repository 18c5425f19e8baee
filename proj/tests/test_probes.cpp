#include <catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "ipfsmon/netsim/network.hpp"
#include "ipfsmon/pipeline/pipeline.hpp"
#include "ipfsmon/probes/probes.hpp"

using namespace ipfsmon;

namespace {

TraceRecord rec(double t_s, std::uint64_t peer, RequestType type, const Cid& cid, std::uint8_t flags = 0) {
  TraceRecord r;
  r.timestamp_ns = seconds_to_ns(t_s);
  r.monitor = "m0";
  r.peer = NodeId(U256{{0, 0, 0, peer}});
  r.address = "/ip4/10.0.0." + std::to_string(peer) + "/tcp/4001";
  r.request_type = type;
  r.cid = cid;
  r.flags = flags;
  return r;
}

}  // namespace

TEST_CASE("idw lists requesters by first sighting", "[probes]") {
  const Cid c = hash_content("c", CodecKind::Raw), d = hash_content("d", CodecKind::Raw);
  const std::vector<TraceRecord> recs = {
      rec(1, 2, RequestType::WantHave, c), rec(2, 1, RequestType::WantBlock, c), rec(3, 2, RequestType::WantHave, c),
      rec(4, 3, RequestType::Cancel, c),   rec(5, 4, RequestType::WantHave, c, flags::kInterMonitorDuplicate),
      rec(6, 5, RequestType::WantHave, d)};
  const auto hits = probes::idw(recs, c);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].peer == recs[0].peer);
  CHECK(hits[0].first_seen == seconds_to_ns(1));
  CHECK(hits[1].peer == recs[1].peer);
}

TEST_CASE("tnw lists a node's unflagged records", "[probes]") {
  const Cid c = hash_content("c", CodecKind::Raw);
  const std::vector<TraceRecord> recs = {rec(1, 2, RequestType::WantHave, c), rec(2, 1, RequestType::WantHave, c),
                                         rec(3, 2, RequestType::WantHave, c, flags::kRebroadcast),
                                         rec(4, 2, RequestType::Cancel, c)};
  const auto w = probes::tnw(recs, recs[0].peer);
  REQUIRE(w.size() == 2);
  CHECK(w[0].request_type == RequestType::WantHave);
  CHECK(w[1].request_type == RequestType::Cancel);
}

TEST_CASE("bait cids are unique per seed", "[probes]") {
  std::set<Cid> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(probes::bait_cid(s));
  CHECK(seen.size() == 1000);
  CHECK(probes::bait_cid(7) == probes::bait_cid(7));
}

TEST_CASE("tpi follows the target's cache state", "[probes]") {
  netsim::SimConfig c;
  c.seed = 8;
  netsim::Network net(c);
  const auto target = net.add_node(netsim::NodeKind::DhtServer);
  const auto provider = net.add_node(netsim::NodeKind::DhtServer);
  net.connect(target, provider);
  const auto prober = probes::add_prober(net);
  const Cid cid = hash_content("cached", CodecKind::Raw);
  net.store_block(provider, cid);
  const auto pid = net.node(prober).id, tid = net.node(target).id;
  CHECK(!probes::tpi(net, pid, tid, cid));
  net.node_request(target, cid);
  net.run_for(5 * kNsPerSecond);
  CHECK(probes::tpi(net, pid, tid, cid));
  net.purge_cache(target, cid);
  CHECK(!probes::tpi(net, pid, tid, cid));
  CHECK_THROWS_AS(probes::tpi(net, pid, NodeId(U256::max()), cid), probes::ProbeUnreachable);
  net.set_online(target, false);
  CHECK_THROWS_AS(probes::tpi(net, pid, tid, cid), probes::ProbeUnreachable);
}

TEST_CASE("gateway probing finds exactly the backends", "[probes]") {
  netsim::SimConfig c;
  c.n_dht_servers = 40;
  c.n_clients = 10;
  c.n_gateways = 2;
  c.gateway_backends = {4, 2};
  c.n_monitors = 2;
  c.degree_min = 4;
  c.degree_max = 8;
  c.catalog_size = 50;
  c.request_rate_per_node = 0.01;
  c.seed = 15;
  auto net = netsim::build_network(c);
  net.start_workload();
  net.run_for(60 * kNsPerSecond);
  std::vector<NodeId> monitors;
  for (auto m : net.monitors()) monitors.push_back(net.node(m).id);
  const auto gt = net.ground_truth();
  std::vector<probes::GatewayProbeResult> results;
  for (const auto& [dns, backends] : gt.gateway_map) {
    auto r = probes::saturate_gateway(net, dns, monitors, 99 + dns.size());
    CHECK(r.discovered_node_ids == std::set<NodeId>(backends.begin(), backends.end()));
    CHECK(r.probes_sent == r.probe_cids.size());
    for (bool ok : r.http_succeeded) CHECK(ok);
    results.push_back(std::move(r));
  }
  std::vector<TraceRecord> obs;
  for (auto m : net.monitors()) obs.insert(obs.end(), net.trace(m).begin(), net.trace(m).end());
  const auto rows = probes::cross_reference(results, obs);
  CHECK(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row.dns_names.size() == 1);
    CHECK(!row.addresses.empty());
  }
  std::ostringstream out;
  probes::write_cross_reference_csv(out, rows);
  CHECK(out.str().rfind("peer_id,addresses,dns_names,multi_address,shared_address\n", 0) == 0);
  const netsim::NodeIndex not_monitor = 0;
  const std::vector<NodeId> bad = {net.node(not_monitor).id};
  CHECK_THROWS_AS(probes::probe_gateway(net, "gw0.example", bad, 1), std::invalid_argument);
}
