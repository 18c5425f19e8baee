#include "ipfsmon/netsim/config.hpp"

#include <set>

namespace ipfsmon::netsim {

namespace {

void require_fraction(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, "must be in [0, 1], got " + std::to_string(v));
}

void require_nonnegative(double v, const char* field) {
  if (!(v >= 0.0)) throw ConfigError(field, "must be >= 0, got " + std::to_string(v));
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0)) throw ConfigError(field, "must be > 0, got " + std::to_string(v));
}

std::string popularity_kind_name(PopularityKind k) {
  switch (k) {
    case PopularityKind::Zipf:
      return "zipf";
    case PopularityKind::Uniform:
      return "uniform";
    case PopularityKind::LogNormal:
      return "lognormal";
  }
  return "zipf";
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key, std::string("wrong type: ") + e.what());
  }
}

}  // namespace

void SimConfig::validate() const {
  if (degree_min > degree_max) throw ConfigError("degree_range", "min must not exceed max");
  require_fraction(unresolvable_fraction, "unresolvable_fraction");
  require_fraction(gateway_cache_hit_ratio, "gateway_cache_hit_ratio");
  require_fraction(monitor_connect_prob, "monitor_connect_prob");
  require_fraction(gateway_monitor_connect_prob, "gateway_monitor_connect_prob");
  require_nonnegative(request_rate_per_node, "request_rate_per_node");
  require_nonnegative(gateway_request_rate_per_s, "gateway_request_rate_per_s");
  require_nonnegative(duration_s, "duration_s");
  require_positive(rebroadcast_interval, "rebroadcast_interval");
  require_positive(broadcast_timeout_s, "broadcast_timeout_s");
  require_positive(block_timeout_s, "block_timeout_s");
  require_nonnegative(latency_min_ms, "latency_min_ms");
  if (latency_max_ms < latency_min_ms) throw ConfigError("latency_max_ms", "must be >= latency_min_ms");
  if (churn) {
    require_positive(churn->mean_session_s, "churn.mean_session_s");
    require_positive(churn->mean_offline_s, "churn.mean_offline_s");
  }
  if (popularity_sampler.kind == PopularityKind::Zipf) require_nonnegative(popularity_sampler.s, "popularity_sampler.s");
  if (popularity_sampler.kind == PopularityKind::LogNormal) {
    require_positive(popularity_sampler.sigma, "popularity_sampler.sigma");
  }
  if (!monitor_names.empty()) {
    if (monitor_names.size() != n_monitors) throw ConfigError("monitor_names", "length must equal n_monitors");
    std::set<std::string> seen;
    for (const auto& n : monitor_names) {
      if (n.empty() || n.find_first_of(",\r\n") != std::string::npos) {
        throw ConfigError("monitor_names", "invalid monitor name '" + n + "'");
      }
      if (!seen.insert(n).second) throw ConfigError("monitor_names", "duplicate monitor name '" + n + "'");
    }
  }
  if (!gateway_backends.empty()) {
    if (gateway_backends.size() != n_gateways) throw ConfigError("gateway_backends", "length must equal n_gateways");
    for (auto b : gateway_backends) {
      if (b == 0) throw ConfigError("gateway_backends", "every gateway needs at least one backing node");
    }
  }
  for (const auto& cw : codec_mix) require_nonnegative(cw.weight, "codec_mix");
  for (const auto& ab : address_plan) require_nonnegative(ab.weight, "address_plan");
  const std::size_t workload_nodes = n_dht_servers + n_clients;
  if (catalog_size > 0 && unresolvable_fraction < 1.0 && providers_per_item > workload_nodes) {
    throw ConfigError("providers_per_item", "exceeds the number of DHT servers and clients");
  }
  const std::size_t regular = workload_nodes + total_gateway_nodes();
  if (regular > 1 && degree_min >= regular) {
    throw ConfigError("degree_range", "min degree " + std::to_string(degree_min) + " >= node count " +
                                          std::to_string(regular));
  }
}

std::string SimConfig::monitor_name(std::size_t i) const {
  if (i < monitor_names.size()) return monitor_names[i];
  return "m" + std::to_string(i);
}

std::size_t SimConfig::backends_of(std::size_t gateway) const {
  return gateway < gateway_backends.size() ? gateway_backends[gateway] : 1;
}

std::size_t SimConfig::total_gateway_nodes() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n_gateways; ++i) total += backends_of(i);
  return total;
}

SimConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  static const std::set<std::string> kKnown = {
      "n_dht_servers", "n_clients", "n_gateways", "n_monitors", "degree_range", "catalog_size",
      "popularity_sampler", "request_rate_per_node", "request_process", "rebroadcast_interval",
      "unresolvable_fraction", "cache_capacity_blocks", "gateway_cache_hit_ratio", "churn", "duration_s", "seed",
      "broadcast_timeout_s", "block_timeout_s", "latency_min_ms", "latency_max_ms", "monitor_connect_prob",
      "gateway_monitor_connect_prob", "monitor_names", "gateway_backends", "gateway_request_rate_per_s", "gateway_groups", "providers_per_item",
      "codec_mix", "address_plan", "record_messages"};
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.contains(key)) throw ConfigError(key, "unknown configuration field");
  }

  SimConfig c;
  read_field(j, "n_dht_servers", c.n_dht_servers);
  read_field(j, "n_clients", c.n_clients);
  read_field(j, "n_gateways", c.n_gateways);
  read_field(j, "n_monitors", c.n_monitors);
  if (j.contains("degree_range")) {
    const auto& d = j.at("degree_range");
    if (!d.is_array() || d.size() != 2 || !d[0].is_number_unsigned() || !d[1].is_number_unsigned()) {
      throw ConfigError("degree_range", "expected [min, max] of non-negative integers");
    }
    c.degree_min = d[0].get<std::size_t>();
    c.degree_max = d[1].get<std::size_t>();
  }
  read_field(j, "catalog_size", c.catalog_size);
  if (j.contains("popularity_sampler")) {
    const auto& p = j.at("popularity_sampler");
    const auto kind = p.value("kind", std::string("zipf"));
    if (kind == "zipf") {
      c.popularity_sampler.kind = PopularityKind::Zipf;
      c.popularity_sampler.s = p.value("s", 1.0);
    } else if (kind == "uniform") {
      c.popularity_sampler.kind = PopularityKind::Uniform;
    } else if (kind == "lognormal") {
      c.popularity_sampler.kind = PopularityKind::LogNormal;
      c.popularity_sampler.mu = p.value("mu", 0.0);
      c.popularity_sampler.sigma = p.value("sigma", 1.0);
    } else {
      throw ConfigError("popularity_sampler.kind", "expected zipf, uniform or lognormal, got '" + kind + "'");
    }
  }
  read_field(j, "request_rate_per_node", c.request_rate_per_node);
  if (j.contains("request_process")) {
    const auto p = j.at("request_process").get<std::string>();
    if (p == "poisson") {
      c.request_process = RequestProcess::Poisson;
    } else if (p == "periodic") {
      c.request_process = RequestProcess::Periodic;
    } else {
      throw ConfigError("request_process", "expected poisson or periodic, got '" + p + "'");
    }
  }
  read_field(j, "rebroadcast_interval", c.rebroadcast_interval);
  read_field(j, "unresolvable_fraction", c.unresolvable_fraction);
  read_field(j, "cache_capacity_blocks", c.cache_capacity_blocks);
  read_field(j, "gateway_cache_hit_ratio", c.gateway_cache_hit_ratio);
  if (j.contains("churn") && !j.at("churn").is_null()) {
    ChurnModel m;
    const auto& ch = j.at("churn");
    read_field(ch, "mean_session_s", m.mean_session_s);
    read_field(ch, "mean_offline_s", m.mean_offline_s);
    c.churn = m;
  }
  read_field(j, "duration_s", c.duration_s);
  read_field(j, "seed", c.seed);
  read_field(j, "broadcast_timeout_s", c.broadcast_timeout_s);
  read_field(j, "block_timeout_s", c.block_timeout_s);
  read_field(j, "latency_min_ms", c.latency_min_ms);
  read_field(j, "latency_max_ms", c.latency_max_ms);
  read_field(j, "monitor_connect_prob", c.monitor_connect_prob);
  read_field(j, "gateway_monitor_connect_prob", c.gateway_monitor_connect_prob);
  read_field(j, "monitor_names", c.monitor_names);
  read_field(j, "gateway_backends", c.gateway_backends);
  read_field(j, "gateway_request_rate_per_s", c.gateway_request_rate_per_s);
  read_field(j, "gateway_groups", c.gateway_groups);
  read_field(j, "providers_per_item", c.providers_per_item);
  read_field(j, "record_messages", c.record_messages);
  if (j.contains("codec_mix")) {
    const auto& mix = j.at("codec_mix");
    if (!mix.is_object()) throw ConfigError("codec_mix", "expected an object of codec name -> weight");
    for (const auto& [name, weight] : mix.items()) {
      try {
        c.codec_mix.push_back({Codec::parse(name), weight.get<double>()});
      } catch (const std::exception& e) {
        throw ConfigError("codec_mix", e.what());
      }
    }
  }
  if (j.contains("address_plan")) {
    const auto& plan = j.at("address_plan");
    if (!plan.is_array()) throw ConfigError("address_plan", "expected an array of {cidr, weight}");
    for (const auto& entry : plan) {
      AddressBlock b;
      read_field(entry, "cidr", b.cidr);
      read_field(entry, "weight", b.weight);
      c.address_plan.push_back(b);
    }
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const SimConfig& c) {
  nlohmann::json j;
  j["n_dht_servers"] = c.n_dht_servers;
  j["n_clients"] = c.n_clients;
  j["n_gateways"] = c.n_gateways;
  j["n_monitors"] = c.n_monitors;
  j["degree_range"] = {c.degree_min, c.degree_max};
  j["catalog_size"] = c.catalog_size;
  nlohmann::json pop;
  pop["kind"] = popularity_kind_name(c.popularity_sampler.kind);
  if (c.popularity_sampler.kind == PopularityKind::Zipf) pop["s"] = c.popularity_sampler.s;
  if (c.popularity_sampler.kind == PopularityKind::LogNormal) {
    pop["mu"] = c.popularity_sampler.mu;
    pop["sigma"] = c.popularity_sampler.sigma;
  }
  j["popularity_sampler"] = pop;
  j["request_rate_per_node"] = c.request_rate_per_node;
  j["request_process"] = c.request_process == RequestProcess::Poisson ? "poisson" : "periodic";
  j["rebroadcast_interval"] = c.rebroadcast_interval;
  j["unresolvable_fraction"] = c.unresolvable_fraction;
  j["cache_capacity_blocks"] = c.cache_capacity_blocks;
  j["gateway_cache_hit_ratio"] = c.gateway_cache_hit_ratio;
  if (c.churn) {
    j["churn"] = {{"mean_session_s", c.churn->mean_session_s}, {"mean_offline_s", c.churn->mean_offline_s}};
  } else {
    j["churn"] = nullptr;
  }
  j["duration_s"] = c.duration_s;
  j["seed"] = c.seed;
  j["broadcast_timeout_s"] = c.broadcast_timeout_s;
  j["block_timeout_s"] = c.block_timeout_s;
  j["latency_min_ms"] = c.latency_min_ms;
  j["latency_max_ms"] = c.latency_max_ms;
  j["monitor_connect_prob"] = c.monitor_connect_prob;
  j["gateway_monitor_connect_prob"] = c.gateway_monitor_connect_prob;
  j["monitor_names"] = c.monitor_names;
  j["gateway_backends"] = c.gateway_backends;
  j["gateway_request_rate_per_s"] = c.gateway_request_rate_per_s;
  j["gateway_groups"] = c.gateway_groups;
  j["providers_per_item"] = c.providers_per_item;
  nlohmann::json mix = nlohmann::json::object();
  for (const auto& cw : c.codec_mix) mix[cw.codec.name()] = cw.weight;
  j["codec_mix"] = mix;
  nlohmann::json plan = nlohmann::json::array();
  for (const auto& b : c.address_plan) plan.push_back({{"cidr", b.cidr}, {"weight", b.weight}});
  j["address_plan"] = plan;
  j["record_messages"] = c.record_messages;
  return j;
}

}  // namespace ipfsmon::netsim
