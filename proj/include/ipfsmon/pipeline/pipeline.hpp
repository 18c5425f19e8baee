#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipfsmon/core/trace.hpp"

namespace ipfsmon::pipeline {

inline constexpr double kDefaultDupWindowS = 5.0;
inline constexpr double kDefaultRebroadcastWindowS = 31.0;

/// Input trace not sorted by timestamp.
class UnsortedTrace : public std::runtime_error {
 public:
  UnsortedTrace(std::string monitor, std::size_t offset);
  const std::string& monitor() const { return monitor_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string monitor_;
  std::size_t offset_;
};

/// Merged multi-monitor trace, ordered by (timestamp, monitor, per-monitor sequence).
struct UnifiedTrace {
  std::vector<TraceRecord> records;
  std::vector<std::string> provenance;
  double window_dup_s = kDefaultDupWindowS;
  double window_rebroadcast_s = kDefaultRebroadcastWindowS;
};

UnifiedTrace unify(std::span<const std::vector<TraceRecord>> traces);
UnifiedTrace unify(const std::map<std::string, std::vector<TraceRecord>>& traces);

/// Sets bit0 on a record when an earlier unflagged record with the same
/// (peer, request_type, cid) from another monitor lies within window_dup_s.
/// The first record of each duplicate group stays unflagged.
UnifiedTrace mark_inter_monitor_duplicates(UnifiedTrace t);

/// Sets bit1 on a record when the previous record with the same
/// (peer, request_type, cid) on the same monitor lies within window_rebroadcast_s.
UnifiedTrace mark_rebroadcasts(UnifiedTrace t);

/// mark_inter_monitor_duplicates followed by mark_rebroadcasts.
UnifiedTrace mark_all(UnifiedTrace t);

UnifiedTrace filter(UnifiedTrace t, bool drop_dups, bool drop_rebroadcasts, bool drop_cancels);

/// Single-threaded references for the marking kernels.
namespace serial {
UnifiedTrace mark_inter_monitor_duplicates(UnifiedTrace t);
UnifiedTrace mark_rebroadcasts(UnifiedTrace t);
}  // namespace serial

}  // namespace ipfsmon::pipeline
