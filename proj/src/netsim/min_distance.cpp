#include <omp.h>

#include <algorithm>

#include "ipfsmon/netsim/network.hpp"

namespace ipfsmon::netsim {

namespace {

inline double closest_position(std::span<const U256> servers, const U256& target) {
  U256 best = U256::max();
  for (const auto& s : servers) best = std::min(best, s ^ target);
  return best.fraction();
}

}  // namespace

namespace serial {

std::vector<double> min_distances(std::span<const U256> servers, std::span<const NodeId> targets) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& t : targets) out.push_back(closest_position(servers, t.value()));
  return out;
}

}  // namespace serial

std::vector<double> min_distances(std::span<const U256> servers, std::span<const NodeId> targets) {
  std::vector<double> out(targets.size());
  const auto n = static_cast<std::ptrdiff_t>(targets.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = closest_position(servers, targets[static_cast<std::size_t>(i)].value());
  }
  return out;
}

}  // namespace ipfsmon::netsim
