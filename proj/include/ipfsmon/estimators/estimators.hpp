#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfsmon/core/trace.hpp"

namespace ipfsmon::estimators {

/// Samples share no element, so the overlap-based estimate diverges.
class DisjointSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sample carries no information about the size (e.g. a zero distance).
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method : std::uint8_t { TwoMonitor, CouponMLE, DhtMinDistSingle, DhtMinDistMulti };

std::string_view to_token(Method m);  // two-monitor / coupon / dht-min-single / dht-min-multi

struct SizeEstimate {
  double n_hat = 0;
  Method method = Method::TwoMonitor;
  int iterations = 0;
  double residual = 0;
};

nlohmann::json to_json(const SizeEstimate& e);

/// Peer sets observed by r monitors over one window.
struct PeerSetStats {
  std::vector<std::string> monitors;
  std::vector<std::uint64_t> sizes;
  std::vector<std::vector<std::uint64_t>> intersections;  // r x r, diagonal holds sizes
  std::uint64_t union_size = 0;                           // m
  std::uint64_t r = 0;
  std::vector<double> mean_connected;  // per monitor
  double w = 0;                        // mean of mean_connected
};

nlohmann::json to_json(const PeerSetStats& s);
PeerSetStats peer_set_stats_from_json(const nlohmann::json& j);

/// N = p1 * p2 / inter.
SizeEstimate estimate_two_monitor(std::uint64_t p1, std::uint64_t p2, std::uint64_t inter);

/// P[X = m]: probability of m distinct elements after r uniform draws of w
/// distinct elements each from a population of N.
double coupon_density(std::uint64_t N, std::uint64_t w, std::uint64_t r, std::uint64_t m);

/// Root of N - N (1 - m/N)^(1/r) - w = 0 on [m, 1e12].
SizeEstimate solve_coupon_mle(std::uint64_t m, std::uint64_t r, double w);

/// N = -k / sum log(1 - x_j) for normalized closest-peer distances x_j.
SizeEstimate dht_size_from_min_distance(std::span<const double> xs);

inline constexpr double kPeerSampleIntervalS = 60.0;

/// Peer sets connected at any point in [t0, t1]; w averages instantaneous
/// connection counts sampled every sample_interval_s.
PeerSetStats peer_set_stats(const std::map<std::string, std::vector<ConnEvent>>& events, TimeNs t0, TimeNs t1,
                            double sample_interval_s = kPeerSampleIntervalS);

/// min(1, mean_connected / network_size_ref).
double coverage(double mean_connected, double network_size_ref);

}  // namespace ipfsmon::estimators
