#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ipfsmon/core/cid.hpp"
#include "ipfsmon/core/node_id.hpp"
#include "ipfsmon/core/rng.hpp"
#include "ipfsmon/core/trace.hpp"
#include "ipfsmon/netsim/config.hpp"

namespace ipfsmon::netsim {

using NodeIndex = std::uint32_t;

enum class NodeKind : std::uint8_t { DhtServer, DhtClient, Gateway, Monitor };

std::string_view to_string(NodeKind k);

enum class MessageType : std::uint8_t { WantHave, WantBlock, Cancel, Have, DontHave, Block };

std::string_view to_string(MessageType t);

enum class RequestOrigin : std::uint8_t { User, Gateway, Scripted };

enum class RequestStatus : std::uint8_t {
  Pending,          // broadcast/DHT search still running (or idle-looping)
  LocalHit,         // served from the node's own cache or store
  GatewayCacheHit,  // answered by the gateway's HTTP cache, no BitSwap traffic
  Fetched,          // block received from `provider`
  Aborted,          // requester went offline before completion
};

std::string_view to_string(RequestStatus s);

using RequestId = std::size_t;

struct RequestRecord {
  RequestId id = 0;
  TimeNs time = 0;
  NodeIndex node = 0;
  NodeId node_id;
  Cid cid;
  RequestOrigin origin = RequestOrigin::Scripted;
  RequestStatus status = RequestStatus::Pending;
  std::optional<NodeIndex> provider;
  TimeNs resolved_at = -1;
  std::string dns_name;  // gateway requests only
};

/// One delivered protocol message (recorded when SimConfig::record_messages is set).
struct MessageLogEntry {
  TimeNs sent = 0;
  TimeNs delivered = 0;
  MessageType type = MessageType::WantHave;
  NodeIndex from = 0;
  NodeIndex to = 0;
  Cid cid;
  bool rebroadcast = false;

  friend bool operator==(const MessageLogEntry&, const MessageLogEntry&) = default;
};

/// Bounded LRU set of CIDs.
class LruCache {
 public:
  explicit LruCache(std::size_t capacity = 0) : capacity_(capacity) {}

  bool contains(const Cid& c) const { return index_.contains(c); }
  /// Marks `c` most recently used; no-op if absent.
  void touch(const Cid& c);
  /// Inserts (or touches) `c`; returns the evicted entry, if any.
  std::optional<Cid> insert(const Cid& c);
  bool erase(const Cid& c);
  std::vector<Cid> clear();
  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Most recent first.
  std::vector<Cid> entries() const { return {order_.begin(), order_.end()}; }

 private:
  std::size_t capacity_;
  std::list<Cid> order_;
  std::unordered_map<Cid, std::list<Cid>::iterator, CidHash> index_;
};

/// Interval history of block possession, used as the cached(node, cid, t) oracle.
class CacheHistory {
 public:
  void open(const NodeId& node, const Cid& cid, TimeNs t);
  void close(const NodeId& node, const Cid& cid, TimeNs t);
  bool held_at(const NodeId& node, const Cid& cid, TimeNs t) const;

 private:
  std::map<std::pair<NodeId, Cid>, std::vector<std::pair<TimeNs, TimeNs>>> intervals_;
};

struct MonitorSummary {
  std::string name;
  NodeId id;
  std::size_t trace_records = 0;
  std::size_t conn_events = 0;
  std::size_t want_deliveries = 0;         // WantHave + WantBlock
  std::size_t rebroadcast_deliveries = 0;  // subset caused by re-broadcast timers
  std::size_t cancel_deliveries = 0;
};

/// Simulator-side truth for checking monitors and attacks.
struct GroundTruth {
  std::size_t true_n = 0;  // non-monitor nodes
  std::vector<RequestRecord> requests_issued;
  std::map<std::string, std::vector<NodeId>> gateway_map;
  std::map<NodeId, std::string> origin_groups;  // gateway node -> group label
  std::vector<MonitorSummary> monitors;
  std::size_t initial_broadcasts = 0;  // sessions that broadcast a WANT_HAVE
  std::size_t rebroadcasts = 0;        // re-broadcast rounds
  CacheHistory cache_states;

  bool cached(const NodeId& node, const Cid& cid, TimeNs t) const { return cache_states.held_at(node, cid, t); }
};

struct SimOutput {
  std::map<std::string, std::vector<TraceRecord>> traces;
  std::map<std::string, std::vector<ConnEvent>> conn_events;
  GroundTruth ground_truth;
};

struct SimNode {
  NodeId id;
  NodeKind kind = NodeKind::DhtServer;
  std::string address;
  std::string name;  // monitor name or gateway DNS name
  bool online = true;
  bool workload = false;  // issues user requests
  std::vector<NodeIndex> peers;       // sorted
  std::vector<NodeIndex> home_peers;  // sorted; restored after churn
  LruCache cache;
  std::set<Cid> store;  // own content, never evicted
  std::map<NodeIndex, std::map<Cid, RequestType>> want_lists_received;
};

struct CatalogItem {
  Cid cid;
  bool resolvable = true;
  std::vector<NodeIndex> providers;
};

/// Deterministic discrete-event simulation of an IPFS-like overlay.
///
/// Retrieval follows the broadcast-then-DHT flow: local cache check, WANT_HAVE
/// to all peers, DHT provider search after `broadcast_timeout_s`, WANT_BLOCK to
/// the earliest HAVE responder (failover after `block_timeout_s`), CANCEL to
/// every peer that saw the want once the block arrives, and a re-broadcast plus
/// DHT re-search every `rebroadcast_interval` while unresolved.
class Network {
 public:
  explicit Network(SimConfig cfg);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  const SimConfig& config() const { return cfg_; }

  // --- topology ---------------------------------------------------------
  NodeIndex add_node(NodeKind kind, std::optional<NodeId> id = std::nullopt, std::string address = {},
                     std::string name = {});
  /// `persistent` links are re-established when a churned node comes back.
  void connect(NodeIndex a, NodeIndex b, bool persistent = true);
  void disconnect(NodeIndex a, NodeIndex b);
  bool connected(NodeIndex a, NodeIndex b) const;
  void set_online(NodeIndex n, bool online);
  void set_address(NodeIndex n, std::string address);
  void set_workload(NodeIndex n, bool enabled) { node_mut(n).workload = enabled; }
  void register_gateway(const std::string& dns_name, std::vector<NodeIndex> backends);
  void set_catalog(std::vector<CatalogItem> catalog, std::vector<double> weights);

  std::size_t node_count() const { return nodes_.size(); }
  const SimNode& node(NodeIndex n) const { return nodes_.at(n); }
  std::optional<NodeIndex> find_node(const NodeId& id) const;
  const std::vector<NodeIndex>& monitors() const { return monitors_; }
  std::optional<NodeIndex> monitor_by_name(const std::string& name) const;
  const std::vector<CatalogItem>& catalog() const { return catalog_; }
  const std::map<std::string, std::vector<NodeIndex>>& gateways() const { return gateways_; }

  // --- content and DHT --------------------------------------------------
  /// Places `cid` in the node's permanent store (its own content).
  void store_block(NodeIndex n, const Cid& cid);
  void dht_provide(NodeIndex n, const Cid& cid);
  /// Online nodes that provided `cid`, ascending index order.
  std::vector<NodeIndex> dht_find_providers(const Cid& cid) const;
  void purge_cache(NodeIndex n, std::optional<Cid> cid = std::nullopt);
  bool holds(NodeIndex n, const Cid& cid) const;
  bool cached(NodeIndex n, const Cid& cid) const { return node(n).cache.contains(cid); }

  /// min over online DHT servers of pos(id XOR target).
  double sample_min_distance(const NodeId& target) const;
  /// Batched variant, OpenMP-parallel over targets.
  std::vector<double> sample_min_distances(std::span<const NodeId> targets) const;
  /// Ids of online DHT servers (DhtServer and Gateway nodes).
  std::vector<U256> dht_server_ids() const;

  // --- requests ---------------------------------------------------------
  RequestId node_request(NodeIndex n, const Cid& cid, RequestOrigin origin = RequestOrigin::Scripted);
  RequestId gateway_http_request(const std::string& dns_name, const Cid& cid);
  const RequestRecord& request(RequestId id) const { return requests_.at(id); }
  const std::vector<RequestRecord>& requests() const { return requests_; }

  /// Sends a single WANT_HAVE from `prober` to `target`; the answer is
  /// available through probe_answer() once delivered.
  std::size_t send_probe(NodeIndex prober, NodeIndex target, const Cid& cid);
  /// true = HAVE, false = DONT_HAVE, nullopt = no answer yet.
  std::optional<bool> probe_answer(std::size_t probe) const { return probes_.at(probe).answer; }

  // --- time -------------------------------------------------------------
  TimeNs now() const { return now_; }
  /// Schedules workload, gateway traffic and churn (idempotent).
  void start_workload();
  /// Processes all events with time <= t, then sets now() = t.
  void run_until(TimeNs t);
  void run_for(TimeNs d) { run_until(now_ + d); }

  // --- observation ------------------------------------------------------
  const std::vector<TraceRecord>& trace(NodeIndex monitor) const;
  const std::vector<ConnEvent>& conn_events(NodeIndex monitor) const;
  const std::vector<MessageLogEntry>& message_log() const { return message_log_; }
  GroundTruth ground_truth() const;
  SimOutput output() const;

  /// Constant one-way delay of the link a<->b.
  TimeNs link_latency(NodeIndex a, NodeIndex b) const;

 private:
  enum class TimerKind : std::uint8_t { BroadcastTimeout, DhtTimeout, BlockTimeout, Rebroadcast };

  struct Deliver {
    MessageType type;
    NodeIndex from;
    NodeIndex to;
    Cid cid;
    TimeNs sent;
    bool rebroadcast;
  };
  struct UserArrival {
    NodeIndex node;
  };
  struct GatewayArrival {
    std::string dns_name;
  };
  struct SessionTimer {
    NodeIndex node;
    Cid cid;
    std::uint64_t generation;
    TimerKind kind;
    std::uint64_t block_generation;
  };
  struct ChurnToggle {
    NodeIndex node;
  };
  using Payload = std::variant<Deliver, UserArrival, GatewayArrival, SessionTimer, ChurnToggle>;

  struct Event {
    TimeNs time;
    std::uint64_t seq;
    Payload payload;
  };
  struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  enum class Phase : std::uint8_t { Broadcast, DhtWait, Idle };

  struct Session {
    std::vector<RequestId> requests;
    std::uint64_t generation = 0;
    Phase phase = Phase::Broadcast;
    std::vector<NodeIndex> have_peers;  // S(c), in HAVE arrival order
    std::size_t next_block_peer = 0;
    bool block_outstanding = false;
    std::uint64_t block_generation = 0;
    std::set<NodeIndex> wanted_from;
    std::size_t broadcast_targets = 0;
    std::size_t dont_haves = 0;
  };

  struct Probe {
    NodeIndex prober;
    NodeIndex target;
    Cid cid;
    std::optional<bool> answer;
  };

  SimNode& node_mut(NodeIndex n) { return nodes_.at(n); }
  void schedule(TimeNs t, Payload p);
  void dispatch(const Event& e);
  void handle(const Deliver& d);
  void handle(const UserArrival& a);
  void handle(const GatewayArrival& a);
  void handle(const SessionTimer& t);
  void handle(const ChurnToggle& c);

  bool send(MessageType type, NodeIndex from, NodeIndex to, const Cid& cid, bool rebroadcast = false);
  void broadcast_want(NodeIndex n, const Cid& cid, Session& s, bool rebroadcast);
  void dht_search(NodeIndex n, const Cid& cid, Session& s, bool from_idle);
  void request_block(NodeIndex n, const Cid& cid, Session& s);
  void on_have(NodeIndex n, NodeIndex from, const Cid& cid);
  void on_dont_have(NodeIndex n, NodeIndex from, const Cid& cid);
  void on_block(NodeIndex n, NodeIndex from, const Cid& cid);
  void cache_insert(NodeIndex n, const Cid& cid);
  void resolve_requests(Session& s, RequestStatus status, std::optional<NodeIndex> provider);
  void go_offline(NodeIndex n);
  void go_online(NodeIndex n);
  void record_conn(NodeIndex monitor, NodeIndex peer, ConnKind kind);
  std::size_t monitor_slot(NodeIndex n) const;
  const Cid& sample_catalog_cid();
  TimeNs next_interarrival(double rate);

  SimConfig cfg_;
  Rng rng_;
  TimeNs now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t generation_counter_ = 0;
  bool workload_started_ = false;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;

  std::vector<SimNode> nodes_;
  std::unordered_map<NodeId, NodeIndex, NodeIdHash> by_id_;
  std::vector<NodeIndex> monitors_;
  std::vector<std::vector<TraceRecord>> traces_;
  std::vector<std::vector<ConnEvent>> conn_;
  std::vector<MonitorSummary> monitor_summary_;
  std::vector<std::map<Cid, Session>> sessions_;

  std::map<Cid, std::set<NodeIndex>> provider_records_;
  std::vector<CatalogItem> catalog_;
  std::optional<std::discrete_distribution<std::size_t>> catalog_sampler_;
  std::map<std::string, std::vector<NodeIndex>> gateways_;
  std::map<std::string, std::size_t> gateway_round_robin_;

  std::vector<RequestRecord> requests_;
  std::vector<Probe> probes_;
  std::vector<MessageLogEntry> message_log_;
  CacheHistory cache_history_;
  std::size_t initial_broadcasts_ = 0;
  std::size_t rebroadcasts_ = 0;
};

/// Builds the configured world: uniform node ids, a degree-bounded random
/// graph among regular nodes, monitor links, gateways, catalog and providers.
/// Throws ConfigError for unsatisfiable degree constraints.
Network build_network(const SimConfig& cfg);

/// Starts the workload, advances the clock to `duration_s` and collects output.
SimOutput run(Network& net, double duration_s);

/// Degree-bounded random graph on n vertices (adjacency lists, sorted).
std::vector<std::vector<NodeIndex>> random_degree_graph(std::size_t n, std::size_t degree_min, std::size_t degree_max,
                                                        Rng& rng);

/// Serialized ground truth (true_n, gateway_map, summary counts).
nlohmann::json ground_truth_to_json(const GroundTruth& gt);

namespace serial {
/// Reference implementation of Network::sample_min_distances (single loop).
std::vector<double> min_distances(std::span<const U256> servers, std::span<const NodeId> targets);
}  // namespace serial

/// OpenMP kernel behind Network::sample_min_distances.
std::vector<double> min_distances(std::span<const U256> servers, std::span<const NodeId> targets);

}  // namespace ipfsmon::netsim
