#include "ipfsmon/netsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ipfsmon::netsim {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::DhtServer:
      return "dht_server";
    case NodeKind::DhtClient:
      return "dht_client";
    case NodeKind::Gateway:
      return "gateway";
    case NodeKind::Monitor:
      return "monitor";
  }
  return "?";
}

std::string_view to_string(MessageType t) {
  switch (t) {
    case MessageType::WantHave:
      return "want_have";
    case MessageType::WantBlock:
      return "want_block";
    case MessageType::Cancel:
      return "cancel";
    case MessageType::Have:
      return "have";
    case MessageType::DontHave:
      return "dont_have";
    case MessageType::Block:
      return "block";
  }
  return "?";
}

std::string_view to_string(RequestStatus s) {
  switch (s) {
    case RequestStatus::Pending:
      return "pending";
    case RequestStatus::LocalHit:
      return "local_hit";
    case RequestStatus::GatewayCacheHit:
      return "gateway_cache_hit";
    case RequestStatus::Fetched:
      return "fetched";
    case RequestStatus::Aborted:
      return "aborted";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LruCache

void LruCache::touch(const Cid& c) {
  auto it = index_.find(c);
  if (it == index_.end()) return;
  order_.splice(order_.begin(), order_, it->second);
}

std::optional<Cid> LruCache::insert(const Cid& c) {
  if (capacity_ == 0) return std::nullopt;
  if (auto it = index_.find(c); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return std::nullopt;
  }
  order_.push_front(c);
  index_.emplace(c, order_.begin());
  if (order_.size() <= capacity_) return std::nullopt;
  Cid victim = order_.back();
  index_.erase(victim);
  order_.pop_back();
  return victim;
}

bool LruCache::erase(const Cid& c) {
  auto it = index_.find(c);
  if (it == index_.end()) return false;
  order_.erase(it->second);
  index_.erase(it);
  return true;
}

std::vector<Cid> LruCache::clear() {
  std::vector<Cid> out(order_.begin(), order_.end());
  order_.clear();
  index_.clear();
  return out;
}

// ---------------------------------------------------------------------------
// CacheHistory

void CacheHistory::open(const NodeId& node, const Cid& cid, TimeNs t) {
  auto& v = intervals_[{node, cid}];
  if (!v.empty() && v.back().second == std::numeric_limits<TimeNs>::max()) return;
  v.emplace_back(t, std::numeric_limits<TimeNs>::max());
}

void CacheHistory::close(const NodeId& node, const Cid& cid, TimeNs t) {
  auto it = intervals_.find({node, cid});
  if (it == intervals_.end() || it->second.empty()) return;
  auto& last = it->second.back();
  if (last.second == std::numeric_limits<TimeNs>::max()) last.second = t;
}

bool CacheHistory::held_at(const NodeId& node, const Cid& cid, TimeNs t) const {
  auto it = intervals_.find({node, cid});
  if (it == intervals_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [t](const auto& iv) { return iv.first <= t && t < iv.second; });
}

// ---------------------------------------------------------------------------
// Network: topology

Network::Network(SimConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) { cfg_.validate(); }

NodeIndex Network::add_node(NodeKind kind, std::optional<NodeId> id, std::string address, std::string name) {
  const auto index = static_cast<NodeIndex>(nodes_.size());
  SimNode n;
  n.id = id ? *id : NodeId::random(rng_);
  if (by_id_.contains(n.id)) throw std::invalid_argument("duplicate node id " + n.id.to_hex());
  n.kind = kind;
  if (address.empty()) {
    address = "/ip4/10." + std::to_string((index >> 16) & 0xff) + "." + std::to_string((index >> 8) & 0xff) + "." +
              std::to_string(index & 0xff) + "/tcp/4001";
  }
  n.address = std::move(address);
  if (kind == NodeKind::Monitor && name.empty()) name = cfg_.monitor_name(monitors_.size());
  n.name = std::move(name);
  n.cache = LruCache(kind == NodeKind::Monitor ? 0 : cfg_.cache_capacity_blocks);
  by_id_.emplace(n.id, index);
  nodes_.push_back(std::move(n));
  sessions_.emplace_back();
  if (kind == NodeKind::Monitor) {
    for (NodeIndex m : monitors_) {
      if (nodes_[m].name == nodes_.back().name) throw std::invalid_argument("duplicate monitor name " + nodes_[m].name);
    }
    monitors_.push_back(index);
    traces_.emplace_back();
    conn_.emplace_back();
    MonitorSummary s;
    s.name = nodes_.back().name;
    s.id = nodes_.back().id;
    monitor_summary_.push_back(s);
  }
  return index;
}

namespace {
void insert_sorted(std::vector<NodeIndex>& v, NodeIndex x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}
void erase_sorted(std::vector<NodeIndex>& v, NodeIndex x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}
}  // namespace

std::size_t Network::monitor_slot(NodeIndex n) const {
  auto it = std::find(monitors_.begin(), monitors_.end(), n);
  return static_cast<std::size_t>(it - monitors_.begin());
}

void Network::record_conn(NodeIndex monitor, NodeIndex peer, ConnKind kind) {
  const auto slot = monitor_slot(monitor);
  conn_[slot].push_back(ConnEvent{now_, nodes_[monitor].name, nodes_[peer].id, kind});
  ++monitor_summary_[slot].conn_events;
}

void Network::connect(NodeIndex a, NodeIndex b, bool persistent) {
  if (a == b) throw std::invalid_argument("cannot connect a node to itself");
  auto& na = node_mut(a);
  auto& nb = node_mut(b);
  if (persistent) {
    insert_sorted(na.home_peers, b);
    insert_sorted(nb.home_peers, a);
  }
  if (!na.online || !nb.online || connected(a, b)) return;
  insert_sorted(na.peers, b);
  insert_sorted(nb.peers, a);
  if (na.kind == NodeKind::Monitor) record_conn(a, b, ConnKind::Connect);
  if (nb.kind == NodeKind::Monitor) record_conn(b, a, ConnKind::Connect);
}

void Network::disconnect(NodeIndex a, NodeIndex b) {
  if (!connected(a, b)) return;
  auto& na = node_mut(a);
  auto& nb = node_mut(b);
  erase_sorted(na.peers, b);
  erase_sorted(nb.peers, a);
  // want_list entries persist only while the peer is connected.
  na.want_lists_received.erase(b);
  nb.want_lists_received.erase(a);
  if (na.kind == NodeKind::Monitor) record_conn(a, b, ConnKind::Disconnect);
  if (nb.kind == NodeKind::Monitor) record_conn(b, a, ConnKind::Disconnect);
}

bool Network::connected(NodeIndex a, NodeIndex b) const {
  const auto& pa = node(a).peers;
  return std::binary_search(pa.begin(), pa.end(), b);
}

void Network::set_online(NodeIndex n, bool online) {
  if (node_mut(n).online == online) return;
  if (online) {
    go_online(n);
  } else {
    go_offline(n);
  }
}

void Network::set_address(NodeIndex n, std::string address) { node_mut(n).address = std::move(address); }

void Network::register_gateway(const std::string& dns_name, std::vector<NodeIndex> backends) {
  if (backends.empty()) throw std::invalid_argument("gateway " + dns_name + " needs at least one backing node");
  for (NodeIndex b : backends) {
    if (node_mut(b).kind == NodeKind::Monitor) throw std::invalid_argument("a monitor cannot back a gateway");
    if (node_mut(b).name.empty()) node_mut(b).name = dns_name;
  }
  gateways_[dns_name] = std::move(backends);
  gateway_round_robin_[dns_name] = 0;
}

void Network::set_catalog(std::vector<CatalogItem> catalog, std::vector<double> weights) {
  if (catalog.size() != weights.size()) throw std::invalid_argument("catalog and weights differ in length");
  catalog_ = std::move(catalog);
  if (catalog_.empty()) {
    catalog_sampler_.reset();
  } else {
    catalog_sampler_.emplace(weights.begin(), weights.end());
  }
}

std::optional<NodeIndex> Network::find_node(const NodeId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeIndex> Network::monitor_by_name(const std::string& name) const {
  for (NodeIndex m : monitors_) {
    if (nodes_[m].name == name) return m;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Content and DHT

void Network::store_block(NodeIndex n, const Cid& cid) {
  auto& nd = node_mut(n);
  if (nd.store.insert(cid).second) cache_history_.open(nd.id, cid, now_);
}

void Network::dht_provide(NodeIndex n, const Cid& cid) { provider_records_[cid].insert(n); }

std::vector<NodeIndex> Network::dht_find_providers(const Cid& cid) const {
  std::vector<NodeIndex> out;
  auto it = provider_records_.find(cid);
  if (it == provider_records_.end()) return out;
  for (NodeIndex p : it->second) {
    if (nodes_[p].online) out.push_back(p);
  }
  return out;
}

bool Network::holds(NodeIndex n, const Cid& cid) const {
  const auto& nd = node(n);
  return nd.store.contains(cid) || nd.cache.contains(cid);
}

void Network::cache_insert(NodeIndex n, const Cid& cid) {
  auto& nd = node_mut(n);
  const bool had = holds(n, cid);
  const auto evicted = nd.cache.insert(cid);
  if (!had && nd.cache.contains(cid)) cache_history_.open(nd.id, cid, now_);
  if (evicted && !nd.store.contains(*evicted)) cache_history_.close(nd.id, *evicted, now_);
}

void Network::purge_cache(NodeIndex n, std::optional<Cid> cid) {
  auto& nd = node_mut(n);
  std::vector<Cid> removed;
  if (cid) {
    if (nd.cache.erase(*cid)) removed.push_back(*cid);
  } else {
    removed = nd.cache.clear();
  }
  for (const auto& c : removed) {
    if (!nd.store.contains(c)) cache_history_.close(nd.id, c, now_);
  }
}

std::vector<U256> Network::dht_server_ids() const {
  std::vector<U256> ids;
  for (const auto& n : nodes_) {
    if (n.online && (n.kind == NodeKind::DhtServer || n.kind == NodeKind::Gateway)) ids.push_back(n.id.value());
  }
  return ids;
}

double Network::sample_min_distance(const NodeId& target) const {
  const auto servers = dht_server_ids();
  if (servers.empty()) throw std::logic_error("no online DHT servers to sample");
  return serial::min_distances(servers, std::span<const NodeId>(&target, 1)).front();
}

std::vector<double> Network::sample_min_distances(std::span<const NodeId> targets) const {
  const auto servers = dht_server_ids();
  if (servers.empty()) throw std::logic_error("no online DHT servers to sample");
  return min_distances(servers, targets);
}

// ---------------------------------------------------------------------------
// Events

void Network::schedule(TimeNs t, Payload p) { queue_.push(Event{t, seq_++, std::move(p)}); }

TimeNs Network::link_latency(NodeIndex a, NodeIndex b) const {
  const auto lo = std::min(a, b);
  const auto hi = std::max(a, b);
  const double u = unit_interval(derive_seed(cfg_.seed, (static_cast<std::uint64_t>(lo) << 32) | hi));
  const double ms = cfg_.latency_min_ms + u * (cfg_.latency_max_ms - cfg_.latency_min_ms);
  return static_cast<TimeNs>(std::llround(ms * 1e6));
}

bool Network::send(MessageType type, NodeIndex from, NodeIndex to, const Cid& cid, bool rebroadcast) {
  if (!connected(from, to)) return false;
  schedule(now_ + link_latency(from, to), Deliver{type, from, to, cid, now_, rebroadcast});
  return true;
}

void Network::run_until(TimeNs t) {
  while (!queue_.empty() && queue_.top().time <= t) {
    Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    dispatch(e);
  }
  if (t > now_) now_ = t;
}

void Network::dispatch(const Event& e) {
  std::visit([this](const auto& p) { handle(p); }, e.payload);
}

void Network::handle(const Deliver& d) {
  if (!nodes_[d.from].online || !nodes_[d.to].online || !connected(d.from, d.to)) return;
  if (cfg_.record_messages) {
    message_log_.push_back(MessageLogEntry{d.sent, now_, d.type, d.from, d.to, d.cid, d.rebroadcast});
  }
  auto& target = node_mut(d.to);
  const bool is_request = d.type == MessageType::WantHave || d.type == MessageType::WantBlock ||
                          d.type == MessageType::Cancel;
  if (is_request && target.kind == NodeKind::Monitor) {
    const auto slot = monitor_slot(d.to);
    const auto rtype = d.type == MessageType::WantHave    ? RequestType::WantHave
                       : d.type == MessageType::WantBlock ? RequestType::WantBlock
                                                          : RequestType::Cancel;
    traces_[slot].push_back(TraceRecord{now_, target.name, nodes_[d.from].id, nodes_[d.from].address, rtype, d.cid, 0});
    auto& summary = monitor_summary_[slot];
    ++summary.trace_records;
    if (rtype == RequestType::Cancel) {
      ++summary.cancel_deliveries;
    } else {
      ++summary.want_deliveries;
      if (d.rebroadcast) ++summary.rebroadcast_deliveries;
    }
  }

  switch (d.type) {
    case MessageType::WantHave: {
      target.want_lists_received[d.from][d.cid] = RequestType::WantHave;
      const bool have = holds(d.to, d.cid);
      // Monitors serve nothing except blocks they explicitly store (bait).
      if (target.kind == NodeKind::Monitor && !have) break;
      send(have ? MessageType::Have : MessageType::DontHave, d.to, d.from, d.cid);
      break;
    }
    case MessageType::WantBlock:
      target.want_lists_received[d.from][d.cid] = RequestType::WantBlock;
      if (holds(d.to, d.cid)) send(MessageType::Block, d.to, d.from, d.cid);
      break;
    case MessageType::Cancel: {
      auto it = target.want_lists_received.find(d.from);
      if (it != target.want_lists_received.end()) {
        it->second.erase(d.cid);
        if (it->second.empty()) target.want_lists_received.erase(it);
      }
      break;
    }
    case MessageType::Have:
      on_have(d.to, d.from, d.cid);
      break;
    case MessageType::DontHave:
      on_dont_have(d.to, d.from, d.cid);
      break;
    case MessageType::Block:
      on_block(d.to, d.from, d.cid);
      break;
  }
}

// ---------------------------------------------------------------------------
// Retrieval state machine

RequestId Network::node_request(NodeIndex n, const Cid& cid, RequestOrigin origin) {
  auto& nd = node_mut(n);
  if (nd.kind == NodeKind::Monitor) throw std::logic_error("monitors never originate requests");
  RequestRecord rec;
  rec.id = requests_.size();
  rec.time = now_;
  rec.node = n;
  rec.node_id = nd.id;
  rec.cid = cid;
  rec.origin = origin;
  if (nd.kind == NodeKind::Gateway) rec.dns_name = nd.name;
  requests_.push_back(rec);
  auto& r = requests_.back();

  if (!nd.online) {
    r.status = RequestStatus::Aborted;
    r.resolved_at = now_;
    return r.id;
  }
  if (holds(n, cid)) {
    nd.cache.touch(cid);
    r.status = RequestStatus::LocalHit;
    r.resolved_at = now_;
    return r.id;
  }
  auto& sessions = sessions_[n];
  if (auto it = sessions.find(cid); it != sessions.end()) {
    it->second.requests.push_back(r.id);
    return r.id;
  }
  Session& s = sessions[cid];
  s.requests.push_back(r.id);
  s.generation = ++generation_counter_;
  ++initial_broadcasts_;
  broadcast_want(n, cid, s, false);
  schedule(now_ + seconds_to_ns(cfg_.broadcast_timeout_s),
           SessionTimer{n, cid, s.generation, TimerKind::BroadcastTimeout, 0});
  schedule(now_ + seconds_to_ns(cfg_.rebroadcast_interval),
           SessionTimer{n, cid, s.generation, TimerKind::Rebroadcast, 0});
  return r.id;
}

void Network::broadcast_want(NodeIndex n, const Cid& cid, Session& s, bool rebroadcast) {
  std::size_t sent = 0;
  for (NodeIndex p : nodes_[n].peers) {
    if (send(MessageType::WantHave, n, p, cid, rebroadcast)) {
      s.wanted_from.insert(p);
      ++sent;
    }
  }
  if (!rebroadcast) {
    s.broadcast_targets = sent;
    s.dont_haves = 0;
  }
}

void Network::dht_search(NodeIndex n, const Cid& cid, Session& s, bool from_idle) {
  std::size_t contacted = 0;
  for (NodeIndex p : dht_find_providers(cid)) {
    if (p == n || connected(n, p)) continue;
    connect(n, p, false);
    if (send(MessageType::WantHave, n, p, cid, from_idle)) {
      s.wanted_from.insert(p);
      ++contacted;
    }
  }
  if (from_idle) return;
  if (contacted == 0) {
    s.phase = Phase::Idle;
    return;
  }
  s.phase = Phase::DhtWait;
  schedule(now_ + seconds_to_ns(cfg_.broadcast_timeout_s),
           SessionTimer{n, cid, s.generation, TimerKind::DhtTimeout, 0});
}

void Network::request_block(NodeIndex n, const Cid& cid, Session& s) {
  while (s.next_block_peer < s.have_peers.size()) {
    const NodeIndex p = s.have_peers[s.next_block_peer];
    if (send(MessageType::WantBlock, n, p, cid)) {
      s.wanted_from.insert(p);
      s.block_outstanding = true;
      s.block_generation = ++generation_counter_;
      schedule(now_ + seconds_to_ns(cfg_.block_timeout_s),
               SessionTimer{n, cid, s.generation, TimerKind::BlockTimeout, s.block_generation});
      return;
    }
    ++s.next_block_peer;
  }
  s.block_outstanding = false;
}

void Network::on_have(NodeIndex n, NodeIndex from, const Cid& cid) {
  for (auto& p : probes_) {
    if (p.prober == n && p.target == from && p.cid == cid && !p.answer) p.answer = true;
  }
  auto& sessions = sessions_[n];
  auto it = sessions.find(cid);
  if (it == sessions.end()) return;
  Session& s = it->second;
  if (std::find(s.have_peers.begin(), s.have_peers.end(), from) == s.have_peers.end()) {
    s.have_peers.push_back(from);
  }
  if (!s.block_outstanding) request_block(n, cid, s);
}

void Network::on_dont_have(NodeIndex n, NodeIndex from, const Cid& cid) {
  for (auto& p : probes_) {
    if (p.prober == n && p.target == from && p.cid == cid && !p.answer) p.answer = false;
  }
  auto& sessions = sessions_[n];
  auto it = sessions.find(cid);
  if (it == sessions.end()) return;
  Session& s = it->second;
  if (s.phase != Phase::Broadcast) return;
  ++s.dont_haves;
  // Every broadcast target declined: skip the remaining timeout.
  if (s.have_peers.empty() && s.dont_haves >= s.broadcast_targets) dht_search(n, cid, s, false);
}

void Network::on_block(NodeIndex n, NodeIndex from, const Cid& cid) {
  auto& sessions = sessions_[n];
  auto it = sessions.find(cid);
  if (it == sessions.end()) return;
  Session& s = it->second;
  cache_insert(n, cid);
  resolve_requests(s, RequestStatus::Fetched, from);
  for (NodeIndex p : s.wanted_from) send(MessageType::Cancel, n, p, cid);
  sessions.erase(it);
}

void Network::resolve_requests(Session& s, RequestStatus status, std::optional<NodeIndex> provider) {
  for (RequestId id : s.requests) {
    auto& r = requests_[id];
    if (r.status != RequestStatus::Pending) continue;
    r.status = status;
    r.provider = provider;
    r.resolved_at = now_;
  }
}

void Network::handle(const SessionTimer& t) {
  auto& sessions = sessions_[t.node];
  auto it = sessions.find(t.cid);
  if (it == sessions.end() || it->second.generation != t.generation) return;
  Session& s = it->second;
  switch (t.kind) {
    case TimerKind::BroadcastTimeout:
      if (s.phase == Phase::Broadcast && s.have_peers.empty()) dht_search(t.node, t.cid, s, false);
      break;
    case TimerKind::DhtTimeout:
      if (s.phase == Phase::DhtWait) s.phase = Phase::Idle;
      break;
    case TimerKind::BlockTimeout:
      if (s.block_outstanding && s.block_generation == t.block_generation) {
        s.block_outstanding = false;
        ++s.next_block_peer;
        request_block(t.node, t.cid, s);
      }
      break;
    case TimerKind::Rebroadcast:
      ++rebroadcasts_;
      broadcast_want(t.node, t.cid, s, true);
      dht_search(t.node, t.cid, s, true);
      schedule(now_ + seconds_to_ns(cfg_.rebroadcast_interval), t);
      break;
  }
}

RequestId Network::gateway_http_request(const std::string& dns_name, const Cid& cid) {
  auto it = gateways_.find(dns_name);
  if (it == gateways_.end()) throw std::invalid_argument("unknown gateway DNS name '" + dns_name + "'");
  auto& rr = gateway_round_robin_[dns_name];
  const NodeIndex backend = it->second[rr % it->second.size()];
  ++rr;
  std::bernoulli_distribution hit(cfg_.gateway_cache_hit_ratio);
  if (hit(rng_)) {
    RequestRecord rec;
    rec.id = requests_.size();
    rec.time = now_;
    rec.node = backend;
    rec.node_id = nodes_[backend].id;
    rec.cid = cid;
    rec.origin = RequestOrigin::Gateway;
    rec.status = RequestStatus::GatewayCacheHit;
    rec.resolved_at = now_;
    rec.dns_name = dns_name;
    requests_.push_back(rec);
    return rec.id;
  }
  const auto id = node_request(backend, cid, RequestOrigin::Gateway);
  requests_[id].dns_name = dns_name;
  return id;
}

std::size_t Network::send_probe(NodeIndex prober, NodeIndex target, const Cid& cid) {
  if (node_mut(prober).kind == NodeKind::Monitor) throw std::logic_error("monitors never originate requests");
  probes_.push_back(Probe{prober, target, cid, std::nullopt});
  send(MessageType::WantHave, prober, target, cid);
  return probes_.size() - 1;
}

// ---------------------------------------------------------------------------
// Workload and churn

TimeNs Network::next_interarrival(double rate) {
  std::exponential_distribution<double> gap(rate);
  return std::max<TimeNs>(1, seconds_to_ns(gap(rng_)));
}

const Cid& Network::sample_catalog_cid() { return catalog_[(*catalog_sampler_)(rng_)].cid; }

void Network::start_workload() {
  if (workload_started_) return;
  workload_started_ = true;
  const bool have_catalog = !catalog_.empty();
  if (have_catalog && cfg_.request_rate_per_node > 0.0) {
    const TimeNs period = seconds_to_ns(1.0 / cfg_.request_rate_per_node);
    std::uniform_int_distribution<TimeNs> phase(0, std::max<TimeNs>(0, period - 1));
    for (NodeIndex n = 0; n < nodes_.size(); ++n) {
      if (!nodes_[n].workload) continue;
      const TimeNs first = cfg_.request_process == RequestProcess::Periodic
                               ? phase(rng_)
                               : next_interarrival(cfg_.request_rate_per_node);
      schedule(first, UserArrival{n});
    }
  }
  if (have_catalog && cfg_.gateway_request_rate_per_s > 0.0) {
    for (const auto& [dns, _] : gateways_) {
      schedule(next_interarrival(cfg_.gateway_request_rate_per_s), GatewayArrival{dns});
    }
  }
  if (cfg_.churn) {
    std::exponential_distribution<double> session(1.0 / cfg_.churn->mean_session_s);
    for (NodeIndex n = 0; n < nodes_.size(); ++n) {
      if (nodes_[n].kind == NodeKind::Monitor) continue;
      schedule(seconds_to_ns(session(rng_)), ChurnToggle{n});
    }
  }
}

void Network::handle(const UserArrival& a) {
  if (nodes_[a.node].online) node_request(a.node, sample_catalog_cid(), RequestOrigin::User);
  const TimeNs next = cfg_.request_process == RequestProcess::Periodic
                          ? seconds_to_ns(1.0 / cfg_.request_rate_per_node)
                          : next_interarrival(cfg_.request_rate_per_node);
  schedule(now_ + next, a);
}

void Network::handle(const GatewayArrival& a) {
  gateway_http_request(a.dns_name, sample_catalog_cid());
  schedule(now_ + next_interarrival(cfg_.gateway_request_rate_per_s), a);
}

void Network::handle(const ChurnToggle& c) {
  const bool was_online = nodes_[c.node].online;
  set_online(c.node, !was_online);
  const double mean = was_online ? cfg_.churn->mean_offline_s : cfg_.churn->mean_session_s;
  std::exponential_distribution<double> next(1.0 / mean);
  schedule(now_ + std::max<TimeNs>(1, seconds_to_ns(next(rng_))), c);
}

void Network::go_offline(NodeIndex n) {
  const auto peers = nodes_[n].peers;
  for (NodeIndex p : peers) disconnect(n, p);
  for (auto& [cid, s] : sessions_[n]) resolve_requests(s, RequestStatus::Aborted, std::nullopt);
  sessions_[n].clear();
  nodes_[n].online = false;
}

void Network::go_online(NodeIndex n) {
  nodes_[n].online = true;
  const auto home = nodes_[n].home_peers;
  for (NodeIndex p : home) {
    if (nodes_[p].online) connect(n, p, false);
  }
}

// ---------------------------------------------------------------------------
// Observation

const std::vector<TraceRecord>& Network::trace(NodeIndex monitor) const {
  const auto slot = monitor_slot(monitor);
  if (slot >= traces_.size()) throw std::invalid_argument("not a monitor");
  return traces_[slot];
}

const std::vector<ConnEvent>& Network::conn_events(NodeIndex monitor) const {
  const auto slot = monitor_slot(monitor);
  if (slot >= conn_.size()) throw std::invalid_argument("not a monitor");
  return conn_[slot];
}

GroundTruth Network::ground_truth() const {
  GroundTruth gt;
  gt.true_n = static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const SimNode& n) { return n.kind != NodeKind::Monitor; }));
  gt.requests_issued = requests_;
  for (const auto& [dns, backends] : gateways_) {
    auto& ids = gt.gateway_map[dns];
    const auto group_it = cfg_.gateway_groups.find(dns);
    const std::string group = group_it == cfg_.gateway_groups.end() ? "gateway" : group_it->second;
    for (NodeIndex b : backends) {
      ids.push_back(nodes_[b].id);
      gt.origin_groups[nodes_[b].id] = group;
    }
  }
  gt.monitors = monitor_summary_;
  gt.initial_broadcasts = initial_broadcasts_;
  gt.rebroadcasts = rebroadcasts_;
  gt.cache_states = cache_history_;
  return gt;
}

SimOutput Network::output() const {
  SimOutput out;
  for (std::size_t i = 0; i < monitors_.size(); ++i) {
    const auto& name = nodes_[monitors_[i]].name;
    out.traces[name] = traces_[i];
    out.conn_events[name] = conn_[i];
  }
  out.ground_truth = ground_truth();
  return out;
}

SimOutput run(Network& net, double duration_s) {
  net.start_workload();
  net.run_until(seconds_to_ns(duration_s));
  return net.output();
}

}  // namespace ipfsmon::netsim
