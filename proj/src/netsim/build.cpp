#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ipfsmon/netsim/network.hpp"

namespace ipfsmon::netsim {

namespace {

bool has_edge(const std::vector<NodeIndex>& adj, NodeIndex v) { return std::binary_search(adj.begin(), adj.end(), v); }

void add_edge(std::vector<std::vector<NodeIndex>>& g, NodeIndex a, NodeIndex b) {
  g[a].insert(std::lower_bound(g[a].begin(), g[a].end(), b), b);
  g[b].insert(std::lower_bound(g[b].begin(), g[b].end(), a), a);
}

void remove_edge(std::vector<std::vector<NodeIndex>>& g, NodeIndex a, NodeIndex b) {
  g[a].erase(std::lower_bound(g[a].begin(), g[a].end(), b));
  g[b].erase(std::lower_bound(g[b].begin(), g[b].end(), a));
}

struct Ipv4Block {
  std::uint32_t base = 0;
  int prefix = 0;
};

Ipv4Block parse_cidr(const std::string& cidr) {
  unsigned a = 0, b = 0, c = 0, d = 0;
  int prefix = 0;
  char dot1 = 0, dot2 = 0, dot3 = 0, slash = 0;
  std::istringstream in(cidr);
  in >> a >> dot1 >> b >> dot2 >> c >> dot3 >> d >> slash >> prefix;
  if (!in || dot1 != '.' || dot2 != '.' || dot3 != '.' || slash != '/' || a > 255 || b > 255 || c > 255 || d > 255 ||
      prefix < 0 || prefix > 32) {
    throw ConfigError("address_plan", "invalid CIDR '" + cidr + "'");
  }
  const std::uint32_t base = (a << 24) | (b << 16) | (c << 8) | d;
  const std::uint32_t mask = prefix == 0 ? 0u : ~0u << (32 - prefix);
  return {base & mask, prefix};
}

std::string format_address(std::uint32_t ip) {
  return "/ip4/" + std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xff) + "." +
         std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff) + "/tcp/4001";
}

/// Splits `total` into integer counts proportional to `weights` (largest remainder).
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size(), 0);
  if (total == 0 || sum <= 0.0) return counts;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[remainders[k % remainders.size()].second];
  return counts;
}

}  // namespace

std::vector<std::vector<NodeIndex>> random_degree_graph(std::size_t n, std::size_t degree_min, std::size_t degree_max,
                                                        Rng& rng) {
  std::vector<std::vector<NodeIndex>> g(n);
  if (n < 2) return g;
  if (degree_min > n - 1) {
    throw ConfigError("degree_range", "min degree " + std::to_string(degree_min) + " >= node count " +
                                          std::to_string(n));
  }
  degree_max = std::min(degree_max, n - 1);
  if (degree_max == 0) return g;

  // Erdos-Renyi seed graph with the mean degree at the centre of the range.
  const double p = std::min(1.0, 0.5 * static_cast<double>(degree_min + degree_max) / static_cast<double>(n - 1));
  if (p >= 1.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) g[i].push_back(static_cast<NodeIndex>(j));
      }
    }
  } else if (p > 0.0) {
    std::geometric_distribution<std::size_t> skip(p);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1 + skip(rng); j < n; j += 1 + skip(rng)) {
        g[i].push_back(static_cast<NodeIndex>(j));
        g[j].push_back(static_cast<NodeIndex>(i));
      }
    }
    for (auto& adj : g) std::sort(adj.begin(), adj.end());
  }

  // Repair vertices that fell outside [degree_min, degree_max].
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int round = 0; round < 64; ++round) {
    bool clean = true;
    for (std::size_t v = 0; v < n; ++v) {
      while (g[v].size() > degree_max) {
        clean = false;
        std::vector<NodeIndex> removable;
        for (NodeIndex u : g[v]) {
          if (g[u].size() > degree_min) removable.push_back(u);
        }
        if (removable.empty()) break;
        std::uniform_int_distribution<std::size_t> which(0, removable.size() - 1);
        remove_edge(g, static_cast<NodeIndex>(v), removable[which(rng)]);
      }
      while (g[v].size() < degree_min) {
        clean = false;
        NodeIndex chosen = static_cast<NodeIndex>(n);
        for (int attempt = 0; attempt < 64 && chosen == n; ++attempt) {
          const auto u = static_cast<NodeIndex>(pick(rng));
          if (u != v && g[u].size() < degree_max && !has_edge(g[v], u)) chosen = u;
        }
        if (chosen == n) {
          std::vector<NodeIndex> candidates;
          for (std::size_t u = 0; u < n; ++u) {
            if (u != v && g[u].size() < degree_max && !has_edge(g[v], static_cast<NodeIndex>(u))) {
              candidates.push_back(static_cast<NodeIndex>(u));
            }
          }
          if (candidates.empty()) {
            // Every non-neighbour is saturated: steal an edge u-w and rewire it to v.
            for (std::size_t u = 0; u < n && chosen == n; ++u) {
              if (u == v || has_edge(g[v], static_cast<NodeIndex>(u))) continue;
              for (NodeIndex w : g[u]) {
                if (w != v && !has_edge(g[v], w) && g[w].size() > degree_min) {
                  remove_edge(g, static_cast<NodeIndex>(u), w);
                  chosen = static_cast<NodeIndex>(u);
                  break;
                }
              }
            }
            if (chosen == n) break;
          } else {
            std::uniform_int_distribution<std::size_t> which(0, candidates.size() - 1);
            chosen = candidates[which(rng)];
          }
        }
        add_edge(g, static_cast<NodeIndex>(v), chosen);
      }
    }
    if (clean) return g;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (g[v].size() < degree_min || g[v].size() > degree_max) {
      throw ConfigError("degree_range", "could not build a graph with degrees in [" + std::to_string(degree_min) +
                                            ", " + std::to_string(degree_max) + "]");
    }
  }
  return g;
}

Network build_network(const SimConfig& cfg) {
  cfg.validate();
  Network net(cfg);
  Rng rng(derive_seed(cfg.seed, 0xb111d));

  // Address plan: stratified so realised node shares match the weights.
  std::vector<AddressBlock> plan = cfg.address_plan;
  if (plan.empty()) plan.push_back({"10.0.0.0/8", 1.0});
  std::vector<Ipv4Block> blocks;
  std::vector<double> block_weights;
  for (const auto& b : plan) {
    blocks.push_back(parse_cidr(b.cidr));
    block_weights.push_back(b.weight);
  }
  const std::size_t regular = cfg.n_dht_servers + cfg.n_clients + cfg.total_gateway_nodes();
  const auto block_counts = apportion(regular, block_weights);
  std::vector<std::size_t> block_of_node;
  for (std::size_t b = 0; b < block_counts.size(); ++b) block_of_node.insert(block_of_node.end(), block_counts[b], b);
  std::shuffle(block_of_node.begin(), block_of_node.end(), rng);
  auto next_address = [&](std::size_t slot) {
    const auto& blk = blocks[block_of_node[slot]];
    const std::uint64_t span = blk.prefix == 32 ? 1 : (std::uint64_t{1} << (32 - blk.prefix));
    std::uniform_int_distribution<std::uint64_t> host(0, span - 1);
    return format_address(blk.base + static_cast<std::uint32_t>(host(rng)));
  };

  std::size_t slot = 0;
  std::vector<NodeIndex> regular_nodes;
  std::vector<NodeIndex> workload_nodes;
  for (std::size_t i = 0; i < cfg.n_dht_servers; ++i) {
    const auto n = net.add_node(NodeKind::DhtServer, std::nullopt, next_address(slot++));
    net.set_workload(n, true);
    regular_nodes.push_back(n);
    workload_nodes.push_back(n);
  }
  for (std::size_t i = 0; i < cfg.n_clients; ++i) {
    const auto n = net.add_node(NodeKind::DhtClient, std::nullopt, next_address(slot++));
    net.set_workload(n, true);
    regular_nodes.push_back(n);
    workload_nodes.push_back(n);
  }
  for (std::size_t g = 0; g < cfg.n_gateways; ++g) {
    const auto dns = cfg.gateway_dns_name(g);
    std::vector<NodeIndex> backends;
    for (std::size_t b = 0; b < cfg.backends_of(g); ++b) {
      const auto n = net.add_node(NodeKind::Gateway, std::nullopt, next_address(slot++), dns);
      regular_nodes.push_back(n);
      backends.push_back(n);
    }
    net.register_gateway(dns, std::move(backends));
  }
  std::vector<NodeIndex> monitors;
  for (std::size_t m = 0; m < cfg.n_monitors; ++m) {
    monitors.push_back(net.add_node(NodeKind::Monitor, std::nullopt,
                                    "/ip4/192.0.2." + std::to_string(1 + m % 254) + "/tcp/4001",
                                    cfg.monitor_name(m)));
  }

  const auto graph = random_degree_graph(regular_nodes.size(), cfg.degree_min, cfg.degree_max, rng);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (NodeIndex j : graph[i]) {
      if (j > i) net.connect(regular_nodes[i], regular_nodes[j]);
    }
  }
  // Monitors accept inbound connections only; each regular node dials each
  // monitor independently.
  std::bernoulli_distribution dial(cfg.monitor_connect_prob);
  std::bernoulli_distribution gateway_dial(cfg.gateway_monitor_connect_prob);
  for (NodeIndex n : regular_nodes) {
    const bool gateway = net.node(n).kind == NodeKind::Gateway;
    for (NodeIndex m : monitors) {
      if (gateway ? gateway_dial(rng) : dial(rng)) net.connect(n, m);
    }
  }

  // Catalog: codecs and resolvability are stratified, not sampled per item.
  std::vector<CatalogItem> catalog(cfg.catalog_size);
  std::vector<CodecWeight> mix = cfg.codec_mix;
  if (mix.empty()) mix.push_back({Codec(CodecKind::DagProtobuf), 1.0});
  std::vector<double> mix_weights;
  for (const auto& cw : mix) mix_weights.push_back(cw.weight);
  const auto codec_counts = apportion(cfg.catalog_size, mix_weights);
  std::vector<Codec> codecs;
  for (std::size_t k = 0; k < codec_counts.size(); ++k) codecs.insert(codecs.end(), codec_counts[k], mix[k].codec);
  std::shuffle(codecs.begin(), codecs.end(), rng);

  const auto unresolvable =
      static_cast<std::size_t>(std::llround(cfg.unresolvable_fraction * static_cast<double>(cfg.catalog_size)));
  std::vector<bool> resolvable(cfg.catalog_size, true);
  std::fill_n(resolvable.begin(), std::min(unresolvable, cfg.catalog_size), false);
  std::shuffle(resolvable.begin(), resolvable.end(), rng);

  for (std::size_t i = 0; i < cfg.catalog_size; ++i) {
    auto& item = catalog[i];
    item.cid = hash_content("catalog-item/" + std::to_string(cfg.seed) + "/" + std::to_string(i), codecs[i]);
    item.resolvable = resolvable[i];
    if (!item.resolvable || workload_nodes.empty()) continue;
    std::vector<NodeIndex> pool = workload_nodes;
    for (std::size_t k = 0; k < cfg.providers_per_item && !pool.empty(); ++k) {
      std::uniform_int_distribution<std::size_t> which(0, pool.size() - 1);
      const auto at = which(rng);
      const NodeIndex provider = pool[at];
      pool[at] = pool.back();
      pool.pop_back();
      item.providers.push_back(provider);
      net.store_block(provider, item.cid);
      net.dht_provide(provider, item.cid);
    }
    std::sort(item.providers.begin(), item.providers.end());
  }

  std::vector<double> weights(cfg.catalog_size, 1.0);
  const auto& pop = cfg.popularity_sampler;
  if (pop.kind == PopularityKind::Zipf) {
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = std::pow(static_cast<double>(i + 1), -pop.s);
  } else if (pop.kind == PopularityKind::LogNormal) {
    std::lognormal_distribution<double> ln(pop.mu, pop.sigma);
    for (auto& w : weights) w = ln(rng);
  }
  net.set_catalog(std::move(catalog), std::move(weights));
  return net;
}

}  // namespace ipfsmon::netsim
