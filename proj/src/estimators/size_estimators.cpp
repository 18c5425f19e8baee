#include <cmath>

#include "ipfsmon/estimators/estimators.hpp"

namespace ipfsmon::estimators {

std::string_view to_token(Method m) {
  switch (m) {
    case Method::TwoMonitor:
      return "two-monitor";
    case Method::CouponMLE:
      return "coupon";
    case Method::DhtMinDistSingle:
      return "dht-min-single";
    case Method::DhtMinDistMulti:
      return "dht-min-multi";
  }
  return "unknown";
}

nlohmann::json to_json(const SizeEstimate& e) {
  return {{"n_hat", e.n_hat},
          {"method", std::string(to_token(e.method))},
          {"iterations", e.iterations},
          {"residual", e.residual}};
}

SizeEstimate estimate_two_monitor(std::uint64_t p1, std::uint64_t p2, std::uint64_t inter) {
  if (inter == 0) throw DisjointSamples("peer sets do not intersect");
  if (inter > std::min(p1, p2)) throw std::domain_error("intersection larger than a peer set");
  return {.n_hat = static_cast<double>(p1) * static_cast<double>(p2) / static_cast<double>(inter),
          .method = Method::TwoMonitor};
}

SizeEstimate dht_size_from_min_distance(std::span<const double> xs) {
  if (xs.empty()) throw std::domain_error("no distance samples");
  double sum = 0;
  for (double x : xs) {
    if (x == 0) throw DegenerateSample("zero distance sample");
    if (!(x > 0 && x < 1)) throw std::domain_error("distance sample outside (0, 1)");
    sum += std::log1p(-x);
  }
  return {.n_hat = -static_cast<double>(xs.size()) / sum,
          .method = xs.size() == 1 ? Method::DhtMinDistSingle : Method::DhtMinDistMulti};
}

double coverage(double mean_connected, double network_size_ref) {
  if (!(network_size_ref > 0) || !(mean_connected >= 0)) {
    throw std::domain_error("coverage needs a positive reference size");
  }
  return std::min(1.0, mean_connected / network_size_ref);
}

}  // namespace ipfsmon::estimators
