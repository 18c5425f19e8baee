#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ipfsmon/analytics/analytics.hpp"

namespace ipfsmon::analytics {

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out << "  ";
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
      } else {
        out << std::right << std::setw(static_cast<int>(width[c])) << cells[c];
      }
    }
    out << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) line(row);
  out << std::left;
}

}  // namespace

std::vector<ShareRow> codec_share(std::span<const TraceRecord> records) {
  std::map<Codec, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (const auto& r : records) {
    if (!is_want(r.request_type)) continue;
    ++counts[r.cid.codec];
    ++total;
  }
  std::vector<ShareRow> rows;
  for (auto& [codec, c] : counts) {
    rows.push_back({codec.name(), c, 100.0 * static_cast<double>(c) / static_cast<double>(total)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ShareRow& a, const ShareRow& b) { return a.count > b.count; });
  return rows;
}

std::vector<RatePoint> rate_timeseries(std::span<const TraceRecord> records, double bucket_s, GroupBy group_by,
                                       const std::unordered_map<NodeId, std::string, NodeIdHash>& origin_groups) {
  if (!(bucket_s > 0)) throw std::invalid_argument("bucket length must be positive");
  const TimeNs bucket = seconds_to_ns(bucket_s);
  if (bucket <= 0) throw std::invalid_argument("bucket length below one nanosecond");
  std::map<std::pair<TimeNs, std::string>, std::uint64_t> counts;
  for (const auto& r : records) {
    TimeNs start = r.timestamp_ns / bucket * bucket;
    if (r.timestamp_ns < 0 && start != r.timestamp_ns) start -= bucket;
    std::string group;
    if (group_by == GroupBy::RequestType) {
      group = std::string(to_token(r.request_type));
    } else {
      auto it = origin_groups.find(r.peer);
      group = it == origin_groups.end() ? kNonGatewayGroup : it->second;
    }
    ++counts[{start, std::move(group)}];
  }
  std::vector<RatePoint> out;
  out.reserve(counts.size());
  for (const auto& [k, c] : counts) out.push_back({k.first, k.second, static_cast<double>(c) / ns_to_seconds(bucket)});
  return out;
}

void write_share_csv(std::ostream& out, const std::string& key_header, const std::vector<ShareRow>& rows) {
  out << key_header << ",count,share_pct\n";
  for (const auto& r : rows) out << r.key << ',' << r.count << ',' << fixed(r.share_pct, 2) << '\n';
}

void write_share_table(std::ostream& out, const std::string& key_header, const std::vector<ShareRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) cells.push_back({r.key, std::to_string(r.count), fixed(r.share_pct, 2)});
  write_table(out, {key_header, "count", "share %"}, cells);
}

void write_popularity_csv(std::ostream& out, const PopularityTable& t) {
  out << "cid,rrp,urp\n";
  for (const auto& [cid, e] : t.entries) out << cid.to_string() << ',' << e.rrp << ',' << e.urp << '\n';
}

void write_ecdf_csv(std::ostream& out, const std::vector<EcdfPoint>& points) {
  out << "value,fraction\n";
  for (const auto& p : points) out << p.value << ',' << fixed(p.fraction, 6) << '\n';
}

void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& series) {
  out << "bucket_start_ns,group,rate_per_s\n";
  for (const auto& p : series) out << p.bucket_start_ns << ',' << p.group << ',' << fixed(p.rate_per_s, 6) << '\n';
}

void write_rate_table(std::ostream& out, const std::vector<RatePoint>& series) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& p : series) {
    cells.push_back({fixed(ns_to_seconds(p.bucket_start_ns), 0), p.group, fixed(p.rate_per_s, 4)});
  }
  write_table(out, {"bucket_start_s", "group", "rate/s"}, cells);
}

}  // namespace ipfsmon::analytics
