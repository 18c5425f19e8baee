#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "ipfsmon/analytics/analytics.hpp"
#include "ipfsmon/core/rng.hpp"

using namespace ipfsmon;
using namespace ipfsmon::analytics;

namespace {

TraceRecord want(double t_s, NodeId peer, Cid cid, std::string address = "/ip4/3.1.2.3/tcp/4001") {
  TraceRecord r;
  r.timestamp_ns = seconds_to_ns(t_s);
  r.monitor = "m0";
  r.peer = peer;
  r.address = std::move(address);
  r.cid = cid;
  return r;
}

NodeId peer(std::uint64_t i) { return NodeId(U256{{0, 0, 0, i}}); }

/// Rejection sampler for P(x) ~ x^-a on x >= 1.
std::uint64_t zipf(Rng& rng, double a) {
  const double b = std::pow(2.0, a - 1);
  for (;;) {
    const double u = 1 - unit_interval(rng()), v = unit_interval(rng());
    const double x = std::floor(std::pow(u, -1 / (a - 1)));
    if (x > 1e15) continue;
    const double t = std::pow(1 + 1 / x, a - 1);
    if (v * x * (t - 1) / (b - 1) <= t / b) return static_cast<std::uint64_t>(x);
  }
}

}  // namespace

TEST_CASE("hurwitz zeta matches direct summation", "[analytics]") {
  for (double s : {1.5, 2.0, 2.5, 3.7}) {
    for (double q : {1.0, 2.0, 7.5, 40.0}) {
      long double direct = 0;
      constexpr int kTerms = 2'000'000;
      for (int k = 0; k < kTerms; ++k) direct += std::pow(static_cast<long double>(k) + q, -s);
      // Integral tail beyond the summed terms.
      direct += std::pow(static_cast<long double>(kTerms) + q - 0.5L, 1 - s) / (s - 1);
      CHECK(hurwitz_zeta(s, q) == Catch::Approx(static_cast<double>(direct)).epsilon(1e-9));
    }
  }
  CHECK(hurwitz_zeta(2, 1) == Catch::Approx(M_PI * M_PI / 6).epsilon(1e-13));
  CHECK_THROWS_AS(hurwitz_zeta(1, 1), std::domain_error);
}

TEST_CASE("popularity counts requests and distinct requesters", "[analytics]") {
  const Cid a = hash_content("a", CodecKind::Raw), b = hash_content("b", CodecKind::Raw);
  std::vector<TraceRecord> recs = {want(0, peer(1), a), want(1, peer(1), a), want(2, peer(2), a), want(3, peer(2), b)};
  auto cancel = want(4, peer(3), b);
  cancel.request_type = RequestType::Cancel;
  recs.push_back(cancel);
  auto flagged = want(5, peer(4), b);
  flagged.flags = flags::kRebroadcast;
  recs.push_back(flagged);
  const auto t = popularity(recs);
  CHECK(t.entries.at(a).rrp == 3);
  CHECK(t.entries.at(a).urp == 2);
  CHECK(t.entries.at(b).rrp == 1);
  CHECK(t.entries.at(b).urp == 1);
  CHECK(popularity(recs, false).entries.at(b).rrp == 2);
  CHECK(t.t_begin == 0);
  CHECK(t.t_end == seconds_to_ns(3));
}

TEST_CASE("ecdf steps at distinct values", "[analytics]") {
  const std::vector<std::uint64_t> xs = {3, 1, 1, 2, 3};
  const auto e = ecdf(xs);
  REQUIRE(e.size() == 3);
  CHECK(e[0].value == 1);
  CHECK(e[0].fraction == Catch::Approx(0.4));
  CHECK(e[1].fraction == Catch::Approx(0.6));
  CHECK(e[2].fraction == 1.0);
}

TEST_CASE("power law fit recovers the exponent", "[analytics]") {
  Rng rng(21);
  std::vector<std::uint64_t> xs(4000);
  for (auto& x : xs) x = zipf(rng, 2.5);
  const auto fit = fit_power_law(xs, 100, 5);
  CHECK(fit.alpha == Catch::Approx(2.5).margin(0.1));
  CHECK(fit.p_value >= kPowerLawRejectP);
  CHECK(fit.bootstraps == 100);
  CHECK(fit.n_tail <= xs.size());
}

TEST_CASE("power law fit rejects geometric samples", "[analytics]") {
  Rng rng(22);
  std::geometric_distribution<std::uint64_t> geo(0.1);
  std::vector<std::uint64_t> xs(4000);
  for (auto& x : xs) x = 1 + geo(rng);
  CHECK(fit_power_law(xs, 100, 5).p_value < kPowerLawRejectP);
}

TEST_CASE("parallel bootstrap equals the serial reference", "[analytics]") {
  Rng rng(23);
  std::vector<std::uint64_t> xs(1500);
  for (auto& x : xs) x = zipf(rng, 2.2);
  const auto par = fit_power_law(xs, 40, 9);
  const auto ser = serial::fit_power_law(xs, 40, 9);
  CHECK(par.alpha == ser.alpha);
  CHECK(par.x_min == ser.x_min);
  CHECK(par.p_value == ser.p_value);
  const auto point = fit_power_law_point(xs);
  CHECK(point.alpha == par.alpha);
  CHECK(point.ks_statistic == par.ks_statistic);
}

TEST_CASE("power law fit input checks", "[analytics]") {
  CHECK_THROWS_AS(fit_power_law_point(std::vector<std::uint64_t>(10, 3)), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law_point(std::vector<std::uint64_t>(100, 3)), DegenerateSample);
  std::vector<std::uint64_t> with_zero(100, 2);
  with_zero[0] = 0;
  CHECK_THROWS_AS(fit_power_law_point(with_zero), std::invalid_argument);
}

TEST_CASE("codec share ignores flags and cancels", "[analytics]") {
  const Cid pb = hash_content("a", CodecKind::DagProtobuf), raw = hash_content("b", CodecKind::Raw);
  std::vector<TraceRecord> recs = {want(0, peer(1), pb), want(1, peer(1), pb), want(2, peer(2), pb), want(3, peer(2), raw)};
  recs[1].flags = flags::kInterMonitorDuplicate;
  auto cancel = want(4, peer(3), raw);
  cancel.request_type = RequestType::Cancel;
  recs.push_back(cancel);
  const auto rows = codec_share(recs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key == "DagProtobuf");
  CHECK(rows[0].count == 3);
  CHECK(rows[0].share_pct == Catch::Approx(75));
  CHECK(rows[1].share_pct == Catch::Approx(25));
}

TEST_CASE("geo database uses longest prefix match", "[analytics]") {
  GeoDb db;
  db.add("3.0.0.0/8", "US");
  db.add("3.5.0.0/16", "DE");
  db.add("0.0.0.0/0", "ZZ");
  CHECK(db.lookup_address("/ip4/3.1.2.3/tcp/4001") == "US");
  CHECK(db.lookup_address("3.5.9.9:4001") == "DE");
  CHECK(db.lookup_address("8.8.8.8") == "ZZ");
  CHECK(!db.lookup_address("/ip6/::1/tcp/1"));
  CHECK(parse_ipv4_address("1.2.3.4") == 0x01020304u);
  CHECK(!parse_ipv4_address("1.2.3"));
  CHECK_THROWS_AS(db.add("1.2.3.4", "X"), std::invalid_argument);
  std::istringstream csv("cidr,country\n10.0.0.0/8,NL\n");
  CHECK(GeoDb::read_csv(csv).lookup_address("10.9.9.9") == "NL");
}

TEST_CASE("geo share over unflagged wants", "[analytics]") {
  GeoDb db;
  db.add("3.0.0.0/8", "US");
  const Cid c = hash_content("a", CodecKind::Raw);
  std::vector<TraceRecord> recs = {want(0, peer(1), c), want(1, peer(2), c, "/ip4/9.9.9.9/tcp/1"), want(2, peer(3), c)};
  recs.push_back(want(3, peer(4), c));
  recs.back().flags = flags::kRebroadcast;
  const auto rows = geo_share(recs, db);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key == "US");
  CHECK(rows[0].count == 2);
  CHECK(rows[1].key == kUnknownCountry);
  CHECK(rows[1].share_pct == Catch::Approx(100.0 / 3));
}

TEST_CASE("rate time series", "[analytics]") {
  const Cid c = hash_content("a", CodecKind::Raw);
  std::vector<TraceRecord> recs = {want(0.5, peer(1), c), want(9, peer(2), c), want(12, peer(1), c)};
  recs[1].request_type = RequestType::WantBlock;
  const auto by_type = rate_timeseries(recs, 10, GroupBy::RequestType);
  REQUIRE(by_type.size() == 3);
  CHECK(by_type[0].bucket_start_ns == 0);
  CHECK(by_type[0].rate_per_s == Catch::Approx(0.1));
  std::unordered_map<NodeId, std::string, NodeIdHash> groups = {{peer(2), "gw-a"}};
  const auto by_origin = rate_timeseries(recs, 10, GroupBy::OriginGroup, groups);
  double total = 0;
  for (const auto& p : by_origin) total += p.rate_per_s * 10;
  CHECK(total == Catch::Approx(3));
  bool saw_default = false;
  for (const auto& p : by_origin) saw_default = saw_default || p.group == kNonGatewayGroup;
  CHECK(saw_default);
  CHECK_THROWS_AS(rate_timeseries(recs, 0, GroupBy::RequestType), std::invalid_argument);
}

TEST_CASE("share csv format", "[analytics]") {
  std::ostringstream out;
  write_share_csv(out, "codec", {{"DagProtobuf", 3, 75.0}, {"Raw", 1, 25.0}});
  CHECK(out.str() == "codec,count,share_pct\nDagProtobuf,3,75.00\nRaw,1,25.00\n");
}
