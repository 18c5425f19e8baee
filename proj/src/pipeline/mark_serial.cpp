#include <deque>
#include <unordered_map>

#include "ipfsmon/pipeline/pipeline.hpp"
#include "key.hpp"

namespace ipfsmon::pipeline::serial {

using detail::Key;
using detail::KeyHash;

UnifiedTrace mark_inter_monitor_duplicates(UnifiedTrace t) {
  const TimeNs window = seconds_to_ns(t.window_dup_s);
  struct Seen {
    TimeNs at;
    const std::string* monitor;
  };
  std::unordered_map<Key, std::deque<Seen>, KeyHash> open;
  for (auto& r : t.records) {
    auto& q = open[detail::key_of(r)];
    while (!q.empty() && r.timestamp_ns - q.front().at > window) q.pop_front();
    bool dup = false;
    for (const auto& s : q) dup = dup || *s.monitor != r.monitor;
    if (dup) {
      r.flags |= flags::kInterMonitorDuplicate;
    } else {
      r.flags &= static_cast<std::uint8_t>(~flags::kInterMonitorDuplicate);
      q.push_back({r.timestamp_ns, &r.monitor});
    }
  }
  return t;
}

UnifiedTrace mark_rebroadcasts(UnifiedTrace t) {
  const TimeNs window = seconds_to_ns(t.window_rebroadcast_s);
  std::unordered_map<detail::MonitorKey, TimeNs, detail::MonitorKeyHash> last;
  for (auto& r : t.records) {
    auto [it, fresh] = last.try_emplace({r.monitor, detail::key_of(r)}, r.timestamp_ns);
    if (!fresh && r.timestamp_ns - it->second <= window) {
      r.flags |= flags::kRebroadcast;
    } else {
      r.flags &= static_cast<std::uint8_t>(~flags::kRebroadcast);
    }
    it->second = r.timestamp_ns;
  }
  return t;
}

}  // namespace ipfsmon::pipeline::serial
