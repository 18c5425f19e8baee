#include <algorithm>
#include <set>
#include <stdexcept>

#include "ipfsmon/analytics/analytics.hpp"

namespace ipfsmon::analytics {

PopularityTable popularity(std::span<const TraceRecord> records, bool drop_flags) {
  PopularityTable t;
  std::map<Cid, std::set<NodeId>> peers;
  bool first = true;
  for (const auto& r : records) {
    if (!is_want(r.request_type)) continue;
    if (drop_flags && r.flags != 0) continue;
    ++t.entries[r.cid].rrp;
    peers[r.cid].insert(r.peer);
    t.t_begin = first ? r.timestamp_ns : std::min(t.t_begin, r.timestamp_ns);
    t.t_end = first ? r.timestamp_ns : std::max(t.t_end, r.timestamp_ns);
    first = false;
  }
  for (auto& [cid, e] : t.entries) e.urp = peers[cid].size();
  return t;
}

std::vector<EcdfPoint> ecdf(std::span<const std::uint64_t> scores) {
  if (scores.empty()) throw std::invalid_argument("ecdf of an empty sample");
  std::vector<std::uint64_t> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<EcdfPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.push_back({sorted[i], i + 1 == sorted.size() ? 1.0 : static_cast<double>(i + 1) / n});
  }
  return out;
}

}  // namespace ipfsmon::analytics
