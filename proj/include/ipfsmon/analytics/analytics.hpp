#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipfsmon/core/trace.hpp"

namespace ipfsmon::analytics {

class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PopularityEntry {
  std::uint64_t rrp = 0;
  std::uint64_t urp = 0;
};

struct PopularityTable {
  std::map<Cid, PopularityEntry> entries;
  TimeNs t_begin = 0;
  TimeNs t_end = 0;
};

/// RRP and URP per CID over want records; cancels never count.
PopularityTable popularity(std::span<const TraceRecord> records, bool drop_flags = true);

struct EcdfPoint {
  std::uint64_t value = 0;
  double fraction = 0;
};

std::vector<EcdfPoint> ecdf(std::span<const std::uint64_t> scores);

/// Hurwitz zeta: sum over k >= 0 of (k + q)^-s, for s > 1 and q > 0.
double hurwitz_zeta(double s, double q);

struct PowerLawFit {
  double alpha = 0;
  std::uint64_t x_min = 0;
  double ks_statistic = 0;
  double p_value = 0;
  std::uint64_t n_tail = 0;
  std::uint32_t bootstraps = 0;
};

inline constexpr std::uint32_t kDefaultBootstraps = 250;
inline constexpr double kPowerLawRejectP = 0.1;

/// Discrete power-law fit: alpha by maximum likelihood, x_min by minimum KS
/// distance, p-value by semi-parametric bootstrap. Bootstrap i draws from
/// derive_seed(seed, i), so the result does not depend on the thread count.
PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, std::uint32_t bootstraps = kDefaultBootstraps,
                          std::uint64_t seed = 0);

/// Alpha, x_min and KS distance only.
PowerLawFit fit_power_law_point(std::span<const std::uint64_t> samples);

namespace serial {
PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, std::uint32_t bootstraps = kDefaultBootstraps,
                          std::uint64_t seed = 0);
}  // namespace serial

nlohmann::json to_json(const PowerLawFit& f);

struct ShareRow {
  std::string key;
  std::uint64_t count = 0;
  double share_pct = 0;
};

/// Want records per CID codec; flags are ignored, cancels excluded.
std::vector<ShareRow> codec_share(std::span<const TraceRecord> records);

/// IPv4 prefix to country code table with longest-prefix lookup.
class GeoDb {
 public:
  void add(std::string_view cidr, std::string country);
  std::optional<std::string> lookup(std::uint32_t ip) const;
  std::optional<std::string> lookup_address(std::string_view address) const;
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  static GeoDb read_csv(std::istream& in);
  static GeoDb read_csv_file(const std::string& path);

 private:
  std::array<std::unordered_map<std::uint32_t, std::string>, 33> by_len_;
  std::size_t size_ = 0;
};

inline constexpr const char* kUnknownCountry = "??";

/// "a.b.c.d", "a.b.c.d:port" or "/ip4/a.b.c.d/...".
std::optional<std::uint32_t> parse_ipv4_address(std::string_view address);

/// Country shares over unflagged want records.
std::vector<ShareRow> geo_share(std::span<const TraceRecord> records, const GeoDb& db);

enum class GroupBy : std::uint8_t { RequestType, OriginGroup };

struct RatePoint {
  TimeNs bucket_start_ns = 0;
  std::string group;
  double rate_per_s = 0;
};

inline constexpr const char* kNonGatewayGroup = "non-gateway";

/// Records per epoch-aligned bucket divided by the bucket length. Peers
/// missing from origin_groups fall into "non-gateway".
std::vector<RatePoint> rate_timeseries(std::span<const TraceRecord> records, double bucket_s, GroupBy group_by,
                                       const std::unordered_map<NodeId, std::string, NodeIdHash>& origin_groups = {});

void write_share_csv(std::ostream& out, const std::string& key_header, const std::vector<ShareRow>& rows);
void write_share_table(std::ostream& out, const std::string& key_header, const std::vector<ShareRow>& rows);
void write_popularity_csv(std::ostream& out, const PopularityTable& t);
void write_ecdf_csv(std::ostream& out, const std::vector<EcdfPoint>& points);
void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& series);
void write_rate_table(std::ostream& out, const std::vector<RatePoint>& series);

}  // namespace ipfsmon::analytics
