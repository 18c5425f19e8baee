#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipfsmon/core/trace.hpp"
#include "ipfsmon/netsim/network.hpp"

namespace ipfsmon::probes {

class ProbeUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interest {
  NodeId peer;
  TimeNs first_seen = 0;

  friend bool operator==(const Interest&, const Interest&) = default;
};

/// Peers with an unflagged want for `cid`, ordered by first sighting.
std::vector<Interest> idw(std::span<const TraceRecord> records, const Cid& cid);

struct NodeWant {
  TimeNs timestamp_ns = 0;
  RequestType request_type = RequestType::WantHave;
  Cid cid;

  friend bool operator==(const NodeWant&, const NodeWant&) = default;
};

/// Unflagged records sent by `target`, chronological.
std::vector<NodeWant> tnw(std::span<const TraceRecord> records, const NodeId& target);

/// Adds a passive DHT client with no workload, usable as a TPI prober.
netsim::NodeIndex add_prober(netsim::Network& net);

/// Sends one WANT_HAVE for `cid` from `prober` to `target` and advances the
/// simulation until the answer arrives or block_timeout_s passes.
/// true iff the target answered HAVE.
bool tpi(netsim::Network& net, const NodeId& prober, const NodeId& target, const Cid& cid);

inline constexpr double kProbeWindowS = 30.0;
inline constexpr std::size_t kSaturationRounds = 5;

struct GatewayProbeResult {
  std::string dns_name;
  std::vector<Cid> probe_cids;
  std::set<NodeId> discovered_node_ids;
  std::size_t probes_sent = 0;
  std::vector<bool> http_succeeded;
};

/// Bait CID derived from `seed`; distinct seeds give distinct CIDs.
Cid bait_cid(std::uint64_t seed);

/// One bait probe: the monitors store and provide a fresh block, the gateway
/// is asked for it over HTTP, and every WANT_HAVE for it reaching a monitor
/// within the probe window names a backing node.
GatewayProbeResult probe_gateway(netsim::Network& net, const std::string& dns_name, std::span<const NodeId> monitors,
                                 std::uint64_t seed, double window_s = kProbeWindowS);

/// Repeats probes (seeds derived from `seed`) until `rounds` consecutive
/// probes add no new node id, or `max_probes` is reached.
GatewayProbeResult saturate_gateway(netsim::Network& net, const std::string& dns_name,
                                    std::span<const NodeId> monitors, std::uint64_t seed,
                                    std::size_t rounds = kSaturationRounds, std::size_t max_probes = 200,
                                    double window_s = kProbeWindowS);

struct CrossReferenceRow {
  NodeId peer;
  std::vector<std::string> addresses;
  std::vector<std::string> dns_names;
  bool multi_address = false;   // one id seen at several addresses
  bool shared_address = false;  // an address of this id also hosts other ids
};

/// Joins discovered node ids with the addresses observed in `observations`.
std::vector<CrossReferenceRow> cross_reference(std::span<const GatewayProbeResult> results,
                                               std::span<const TraceRecord> observations);

void write_cross_reference_csv(std::ostream& out, const std::vector<CrossReferenceRow>& rows);

}  // namespace ipfsmon::probes
