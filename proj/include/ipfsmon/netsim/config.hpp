#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfsmon/core/cid.hpp"

namespace ipfsmon::netsim {

/// Invalid simulation configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class PopularityKind { Zipf, Uniform, LogNormal };

struct PopularitySampler {
  PopularityKind kind = PopularityKind::Zipf;
  double s = 1.0;      // Zipf exponent
  double mu = 0.0;     // LogNormal
  double sigma = 1.0;  // LogNormal
};

enum class RequestProcess { Poisson, Periodic };

struct ChurnModel {
  double mean_session_s = 3600.0;
  double mean_offline_s = 600.0;
};

struct AddressBlock {
  std::string cidr;  // e.g. "3.0.0.0/8"
  double weight = 1.0;
};

struct CodecWeight {
  Codec codec;
  double weight = 1.0;
};

struct SimConfig {
  std::size_t n_dht_servers = 0;
  std::size_t n_clients = 0;
  std::size_t n_gateways = 0;  // number of gateway DNS names
  std::size_t n_monitors = 0;
  std::size_t degree_min = 600;
  std::size_t degree_max = 900;
  std::size_t catalog_size = 0;
  PopularitySampler popularity_sampler;
  double request_rate_per_node = 0.0;  // requests per second
  RequestProcess request_process = RequestProcess::Poisson;
  double rebroadcast_interval = 30.0;  // seconds
  double unresolvable_fraction = 0.0;
  std::size_t cache_capacity_blocks = 1024;
  double gateway_cache_hit_ratio = 0.0;
  std::optional<ChurnModel> churn;
  double duration_s = 0.0;
  std::uint64_t seed = 0;

  // Timing, topology and workload knobs.
  double broadcast_timeout_s = 1.0;  // broadcast -> DHT fallback
  double block_timeout_s = 1.0;      // WANT_BLOCK failover
  double latency_min_ms = 10.0;
  double latency_max_ms = 200.0;
  double monitor_connect_prob = 0.5;
  double gateway_monitor_connect_prob = 1.0;  // gateway nodes are well-connected hubs
  std::vector<std::string> monitor_names;        // default m0, m1, ...
  std::vector<std::size_t> gateway_backends;     // nodes behind each name, default 1
  double gateway_request_rate_per_s = 0.0;       // HTTP arrivals per DNS name
  std::map<std::string, std::string> gateway_groups;  // dns name -> origin group label
  std::size_t providers_per_item = 1;
  std::vector<CodecWeight> codec_mix;   // default: all DagProtobuf
  std::vector<AddressBlock> address_plan;  // default: 10.0.0.0/8
  bool record_messages = false;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;

  std::string monitor_name(std::size_t i) const;
  std::size_t backends_of(std::size_t gateway) const;
  std::size_t total_gateway_nodes() const;
  std::string gateway_dns_name(std::size_t i) const { return "gw" + std::to_string(i) + ".example"; }
};

SimConfig config_from_json(const nlohmann::json& j);  // throws ConfigError
nlohmann::json config_to_json(const SimConfig& cfg);

}  // namespace ipfsmon::netsim
