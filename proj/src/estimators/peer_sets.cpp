#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ipfsmon/estimators/estimators.hpp"

namespace ipfsmon::estimators {

PeerSetStats peer_set_stats(const std::map<std::string, std::vector<ConnEvent>>& events, TimeNs t0, TimeNs t1,
                            double sample_interval_s) {
  if (t1 <= t0) throw std::invalid_argument("peer_set_stats: window end must follow its start");
  if (!(sample_interval_s > 0)) throw std::invalid_argument("peer_set_stats: sample interval must be positive");
  const TimeNs step = seconds_to_ns(sample_interval_s);

  PeerSetStats s;
  std::vector<std::set<NodeId>> seen;
  for (const auto& [monitor, evs] : events) {
    std::vector<ConnEvent> sorted = evs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ConnEvent& a, const ConnEvent& b) { return a.timestamp_ns < b.timestamp_ns; });
    std::unordered_set<NodeId, NodeIdHash> live;
    std::set<NodeId> any;
    std::size_t next = 0;
    auto advance_to = [&](TimeNs t) {
      for (; next < sorted.size() && sorted[next].timestamp_ns <= t; ++next) {
        const auto& e = sorted[next];
        if (e.kind == ConnKind::Connect) {
          live.insert(e.peer);
          if (e.timestamp_ns >= t0) any.insert(e.peer);
        } else {
          live.erase(e.peer);
        }
      }
    };
    advance_to(t0);
    any.insert(live.begin(), live.end());
    double total = 0;
    std::uint64_t samples = 0;
    for (TimeNs t = t0; t <= t1; t += step) {
      advance_to(t);
      total += static_cast<double>(live.size());
      ++samples;
    }
    advance_to(t1);

    s.monitors.push_back(monitor);
    s.sizes.push_back(any.size());
    s.mean_connected.push_back(total / static_cast<double>(samples));
    seen.push_back(std::move(any));
  }

  s.r = s.monitors.size();
  s.intersections.assign(s.r, std::vector<std::uint64_t>(s.r, 0));
  std::set<NodeId> all;
  for (std::size_t i = 0; i < s.r; ++i) {
    all.insert(seen[i].begin(), seen[i].end());
    for (std::size_t j = i; j < s.r; ++j) {
      std::uint64_t n = 0;
      for (const auto& p : seen[i]) n += seen[j].count(p);
      s.intersections[i][j] = s.intersections[j][i] = n;
    }
  }
  s.union_size = all.size();
  if (s.r > 0) {
    double sum = 0;
    for (double c : s.mean_connected) sum += c;
    s.w = sum / static_cast<double>(s.r);
  }
  return s;
}

nlohmann::json to_json(const PeerSetStats& s) {
  return {{"monitors", s.monitors},   {"sizes", s.sizes}, {"intersections", s.intersections},
          {"union", s.union_size},    {"r", s.r},         {"mean_connected", s.mean_connected},
          {"w", s.w}};
}

PeerSetStats peer_set_stats_from_json(const nlohmann::json& j) {
  PeerSetStats s;
  s.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
  s.r = j.value("r", static_cast<std::uint64_t>(s.sizes.size()));
  s.monitors = j.value("monitors", std::vector<std::string>{});
  s.intersections = j.value("intersections", std::vector<std::vector<std::uint64_t>>{});
  s.union_size = j.value("union", std::uint64_t{0});
  s.mean_connected = j.value("mean_connected", std::vector<double>{});
  s.w = j.value("w", 0.0);
  if (s.sizes.size() != s.r) throw std::invalid_argument("peer set stats: sizes must have r entries");
  if (!s.intersections.empty() && s.intersections.size() != s.r) {
    throw std::invalid_argument("peer set stats: intersections must be r x r");
  }
  return s;
}

}  // namespace ipfsmon::estimators
