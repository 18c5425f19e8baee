#include <queue>
#include <set>

#include "ipfsmon/pipeline/pipeline.hpp"

namespace ipfsmon::pipeline {

UnsortedTrace::UnsortedTrace(std::string monitor, std::size_t offset)
    : std::runtime_error("trace of monitor '" + monitor + "' is not sorted at record " + std::to_string(offset)),
      monitor_(std::move(monitor)),
      offset_(offset) {}

namespace {

UnifiedTrace merge(const std::vector<std::span<const TraceRecord>>& traces, const std::vector<std::string>& labels,
                   std::set<std::string> names) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& tr = traces[i];
    for (std::size_t j = 1; j < tr.size(); ++j) {
      if (tr[j].timestamp_ns < tr[j - 1].timestamp_ns) throw UnsortedTrace(labels[i], j);
    }
    for (const auto& r : tr) names.insert(r.monitor);
    total += tr.size();
  }

  struct Head {
    std::size_t trace;
    std::size_t pos;
  };
  auto later = [&](const Head& a, const Head& b) {
    const auto& ra = traces[a.trace][a.pos];
    const auto& rb = traces[b.trace][b.pos];
    if (ra.timestamp_ns != rb.timestamp_ns) return ra.timestamp_ns > rb.timestamp_ns;
    if (ra.monitor != rb.monitor) return ra.monitor > rb.monitor;
    if (a.trace != b.trace) return a.trace > b.trace;
    return a.pos > b.pos;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!traces[i].empty()) heap.push({i, 0});
  }

  UnifiedTrace out;
  out.records.reserve(total);
  while (!heap.empty()) {
    auto h = heap.top();
    heap.pop();
    out.records.push_back(traces[h.trace][h.pos]);
    if (h.pos + 1 < traces[h.trace].size()) heap.push({h.trace, h.pos + 1});
  }
  out.provenance.assign(names.begin(), names.end());
  return out;
}

}  // namespace

UnifiedTrace unify(std::span<const std::vector<TraceRecord>> traces) {
  std::vector<std::span<const TraceRecord>> spans;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    spans.emplace_back(traces[i]);
    labels.push_back(traces[i].empty() || traces[i].front().monitor.empty() ? "#" + std::to_string(i)
                                                                             : traces[i].front().monitor);
  }
  return merge(spans, labels, {});
}

UnifiedTrace unify(const std::map<std::string, std::vector<TraceRecord>>& traces) {
  std::vector<std::span<const TraceRecord>> spans;
  std::vector<std::string> labels;
  for (const auto& [name, tr] : traces) {
    spans.emplace_back(tr);
    labels.push_back(name);
  }
  return merge(spans, labels, {labels.begin(), labels.end()});
}

UnifiedTrace mark_all(UnifiedTrace t) { return mark_rebroadcasts(mark_inter_monitor_duplicates(std::move(t))); }

UnifiedTrace filter(UnifiedTrace t, bool drop_dups, bool drop_rebroadcasts, bool drop_cancels) {
  std::erase_if(t.records, [&](const TraceRecord& r) {
    return (drop_dups && r.is_duplicate()) || (drop_rebroadcasts && r.is_rebroadcast()) ||
           (drop_cancels && r.request_type == RequestType::Cancel);
  });
  return t;
}

}  // namespace ipfsmon::pipeline
