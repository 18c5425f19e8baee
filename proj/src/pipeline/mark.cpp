#include <omp.h>

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "ipfsmon/pipeline/pipeline.hpp"
#include "key.hpp"

namespace ipfsmon::pipeline {

namespace {

/// Record indices grouped by (peer, request_type, cid), each group in trace order.
std::vector<std::vector<std::size_t>> group_by_key(const std::vector<TraceRecord>& records) {
  std::unordered_map<detail::Key, std::size_t, detail::KeyHash> slot;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, fresh] = slot.try_emplace(detail::key_of(records[i]), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

void mark_group_duplicates(std::vector<TraceRecord>& records, const std::vector<std::size_t>& group, TimeNs window) {
  std::deque<std::size_t> open;
  std::map<std::string_view, std::size_t> per_monitor;
  for (auto i : group) {
    auto& r = records[i];
    while (!open.empty() && r.timestamp_ns - records[open.front()].timestamp_ns > window) {
      auto it = per_monitor.find(records[open.front()].monitor);
      if (--it->second == 0) per_monitor.erase(it);
      open.pop_front();
    }
    auto mine = per_monitor.find(r.monitor);
    const std::size_t same = mine == per_monitor.end() ? 0 : mine->second;
    if (open.size() > same) {
      r.flags |= flags::kInterMonitorDuplicate;
    } else {
      r.flags &= static_cast<std::uint8_t>(~flags::kInterMonitorDuplicate);
      open.push_back(i);
      ++per_monitor[r.monitor];
    }
  }
}

void mark_group_rebroadcasts(std::vector<TraceRecord>& records, const std::vector<std::size_t>& group, TimeNs window) {
  std::map<std::string_view, TimeNs> last;
  for (auto i : group) {
    auto& r = records[i];
    auto [it, fresh] = last.try_emplace(r.monitor, r.timestamp_ns);
    if (!fresh && r.timestamp_ns - it->second <= window) {
      r.flags |= flags::kRebroadcast;
    } else {
      r.flags &= static_cast<std::uint8_t>(~flags::kRebroadcast);
    }
    it->second = r.timestamp_ns;
  }
}

template <class Fn>
void for_each_group(std::vector<TraceRecord>& records, Fn fn) {
  const auto groups = group_by_key(records);
  const auto n = static_cast<std::ptrdiff_t>(groups.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t g = 0; g < n; ++g) fn(records, groups[static_cast<std::size_t>(g)]);
}

}  // namespace

UnifiedTrace mark_inter_monitor_duplicates(UnifiedTrace t) {
  const TimeNs window = seconds_to_ns(t.window_dup_s);
  for_each_group(t.records, [window](auto& recs, const auto& g) { mark_group_duplicates(recs, g, window); });
  return t;
}

UnifiedTrace mark_rebroadcasts(UnifiedTrace t) {
  const TimeNs window = seconds_to_ns(t.window_rebroadcast_s);
  for_each_group(t.records, [window](auto& recs, const auto& g) { mark_group_rebroadcasts(recs, g, window); });
  return t;
}

}  // namespace ipfsmon::pipeline
