#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ipfsmon/analytics/analytics.hpp"
#include "ipfsmon/core/rng.hpp"
#include "ipfsmon/estimators/estimators.hpp"
#include "ipfsmon/netsim/network.hpp"
#include "ipfsmon/pipeline/pipeline.hpp"
#include "ipfsmon/probes/probes.hpp"

using namespace ipfsmon;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Kolmogorov distribution tail Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2 * ((j % 2 == 1) ? 1 : -1) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// One-sample KS p-value of xs against a continuous CDF.
double ks_p_value(std::vector<double> xs, const std::function<double(double)>& cdf, double* d_out = nullptr) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  if (d_out) *d_out = d;
  const double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

/// Uniform sample of w distinct members of [0, n).
std::vector<std::uint32_t> draw_without_replacement(std::uint32_t n, std::uint32_t w, Rng& rng) {
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (std::uint32_t i = 0; i < w; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(w);
  return pool;
}

/// Devroye's rejection sampler for the Zipf law P(x) ~ x^-a, x >= 1.
std::uint64_t zipf_devroye(Rng& rng, double a) {
  const double b = std::pow(2.0, a - 1);
  for (;;) {
    const double u = 1 - unit_interval(rng());
    const double v = unit_interval(rng());
    const double x = std::floor(std::pow(u, -1 / (a - 1)));
    if (x > 1e15) continue;
    const double t = std::pow(1 + 1 / x, a - 1);
    if (v * x * (t - 1) / (b - 1) <= t / b) return static_cast<std::uint64_t>(x);
  }
}

// ---------------------------------------------------------------------------

constexpr double kAc1RelTol = 1e-6;
constexpr double kAc1Seconds = 5;

Outcome ac1() {
  Rng rng(101);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto w = std::uniform_int_distribution<std::uint64_t>(1, 2000)(rng);
    const auto inter = std::uniform_int_distribution<std::uint64_t>(1, w)(rng);
    const double coupon = estimators::solve_coupon_mle(2 * w - inter, 2, static_cast<double>(w)).n_hat;
    const double two = estimators::estimate_two_monitor(w, w, inter).n_hat;
    worst = std::max(worst, std::fabs(coupon - two) / two);
  }
  return {worst <= kAc1RelTol, fmt("max relative difference %.3g over 1000 pairs (tol %.0e)", worst, kAc1RelTol)};
}

constexpr double kAc2SumTol = 1e-9;
constexpr double kAc2Seconds = 10;

Outcome ac2() {
  double worst = 0;
  int cases = 0;
  for (std::uint64_t n = 1; n <= 30; ++n) {
    for (std::uint64_t w = 1; w <= std::min<std::uint64_t>(4, n); ++w) {
      for (std::uint64_t r = 1; r <= 4; ++r) {
        double sum = 0;
        for (std::uint64_t m = w; m <= std::min(n, r * w); ++m) sum += estimators::coupon_density(n, w, r, m);
        worst = std::max(worst, std::fabs(sum - 1));
        ++cases;
      }
    }
  }
  int favourable = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) favourable += a != b;
  }
  const double enumerated = favourable / 9.0;
  const double p = estimators::coupon_density(3, 1, 2, 2);
  const bool ok = worst <= kAc2SumTol && p == 2.0 / 3.0 && enumerated == 2.0 / 3.0;
  return {ok, fmt("%d (N,w,r) cases, max |sum-1| %.3g; P[X=2|N=3,w=1,r=2] = %.17g, enumeration %d/9", cases, worst,
                  p, favourable)};
}

constexpr double kAc3TolR2 = 0.10;
constexpr double kAc3TolR4 = 0.07;
constexpr double kAc3Seconds = 30;

Outcome ac3() {
  constexpr std::uint32_t kN = 10000, kW = 700;
  std::string detail;
  bool ok = true;
  for (std::uint64_t r : {2u, 4u}) {
    std::vector<double> est, eq1;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(derive_seed(3000 + r, seed));
      std::vector<std::uint8_t> hits(kN, 0);
      std::vector<std::vector<std::uint32_t>> draws;
      for (std::uint64_t d = 0; d < r; ++d) {
        draws.push_back(draw_without_replacement(kN, kW, rng));
        for (auto x : draws.back()) ++hits[x];
      }
      const auto m = static_cast<std::uint64_t>(std::count_if(hits.begin(), hits.end(), [](auto h) { return h > 0; }));
      est.push_back(estimators::solve_coupon_mle(m, r, kW).n_hat);
      if (r == 2) eq1.push_back(estimators::estimate_two_monitor(kW, kW, 2 * kW - m).n_hat);
    }
    const double med = median(est);
    const double rel = std::fabs(med - kN) / kN;
    const double tol = r == 2 ? kAc3TolR2 : kAc3TolR4;
    ok = ok && rel <= tol;
    detail += fmt("r=%d median %.1f (rel err %.4f, tol %.2f)", static_cast<int>(r), med, rel, tol);
    if (r == 2) detail += fmt(" [two-monitor median %.1f]; ", median(eq1));
  }
  return {ok, detail};
}

constexpr double kAc4RelTol = 0.10;
constexpr double kAc4Alpha = 0.01;
constexpr double kAc4Seconds = 10;

Outcome ac4() {
  constexpr std::size_t kServers = 5000, kTargets = 1000;
  netsim::SimConfig cfg;
  cfg.seed = 4;
  netsim::Network net(cfg);
  Rng rng(4004);
  for (std::size_t i = 0; i < kServers; ++i) net.add_node(netsim::NodeKind::DhtServer, NodeId::random(rng));
  std::vector<NodeId> targets;
  for (std::size_t i = 0; i < kTargets; ++i) targets.push_back(NodeId::random(rng));
  const auto xs = net.sample_min_distances(targets);
  const double n_hat = estimators::dht_size_from_min_distance(xs).n_hat;
  const double rel = std::fabs(n_hat - kServers) / kServers;
  double d = 0;
  const double p = ks_p_value(
      xs, [](double x) { return 1 - std::pow(1 - x, static_cast<double>(kServers)); }, &d);
  return {rel <= kAc4RelTol && p > kAc4Alpha,
          fmt("n_hat %.1f for N=%zu (rel err %.4f, tol %.2f); KS D=%.4f p=%.3f (alpha %.2f)", n_hat, kServers, rel,
              kAc4RelTol, d, p, kAc4Alpha)};
}

/// Reference flags by direct pairwise search in unified order.
std::vector<std::uint8_t> brute_force_flags(const std::vector<TraceRecord>& recs, double dup_s, double rb_s) {
  const TimeNs dup = seconds_to_ns(dup_s), rb = seconds_to_ns(rb_s);
  std::vector<std::uint8_t> f(recs.size(), 0);
  auto same_key = [](const TraceRecord& a, const TraceRecord& b) {
    return a.peer == b.peer && a.request_type == b.request_type && a.cid == b.cid;
  };
  for (std::size_t i = 0; i < recs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (recs[j].monitor != recs[i].monitor && same_key(recs[i], recs[j]) &&
          recs[i].timestamp_ns - recs[j].timestamp_ns <= dup && !(f[j] & flags::kInterMonitorDuplicate)) {
        f[i] |= flags::kInterMonitorDuplicate;
        break;
      }
    }
    for (std::size_t j = i; j-- > 0;) {
      if (recs[j].monitor == recs[i].monitor && same_key(recs[i], recs[j])) {
        if (recs[i].timestamp_ns - recs[j].timestamp_ns <= rb) f[i] |= flags::kRebroadcast;
        break;
      }
    }
  }
  return f;
}

std::vector<std::vector<TraceRecord>> random_traces(std::uint64_t seed, std::size_t total, std::size_t monitors,
                                                    std::size_t peers, std::size_t cids, double horizon_s) {
  Rng rng(seed);
  std::vector<NodeId> peer_ids;
  for (std::size_t i = 0; i < peers; ++i) peer_ids.push_back(NodeId::random(rng));
  std::vector<Cid> cid_pool;
  for (std::size_t i = 0; i < cids; ++i) cid_pool.push_back(hash_content("c" + std::to_string(i), CodecKind::Raw));
  std::vector<std::vector<TraceRecord>> traces(monitors);
  std::uniform_int_distribution<TimeNs> when(0, seconds_to_ns(horizon_s));
  for (std::size_t i = 0; i < total; ++i) {
    TraceRecord r;
    const auto m = rng() % monitors;
    r.monitor = "m" + std::to_string(m);
    r.peer = peer_ids[rng() % peers];
    r.address = "/ip4/10.0.0.1/tcp/4001";
    r.request_type = static_cast<RequestType>(rng() % 3);
    r.cid = cid_pool[rng() % cids];
    // Coarse timestamps force equal-time ties.
    r.timestamp_ns = when(rng) / kNsPerSecond * kNsPerSecond / 2;
    traces[m].push_back(r);
  }
  for (auto& t : traces) {
    std::stable_sort(t.begin(), t.end(), [](auto& a, auto& b) { return a.timestamp_ns < b.timestamp_ns; });
  }
  return traces;
}

constexpr double kAc5Seconds = 10;

Outcome ac5() {
  struct Case {
    std::size_t total, monitors, peers, cids;
    double horizon;
  };
  const std::vector<Case> cases = {{10000, 3, 20, 10, 20000}, {10000, 4, 5, 3, 30000}, {5000, 2, 10, 5, 3000},
                                   {2000, 5, 3, 2, 1000},     {1000, 2, 50, 50, 100}};
  std::size_t checked = 0, mismatches = 0, idempotence_failures = 0, serial_mismatches = 0, bit0 = 0, bit1 = 0;
  std::uint64_t seed = 500;
  for (const auto& c : cases) {
    const auto traces = random_traces(seed++, c.total, c.monitors, c.peers, c.cids, c.horizon);
    const auto unified = pipeline::unify(traces);
    const auto marked = pipeline::mark_all(unified);
    const auto serial =
        pipeline::serial::mark_rebroadcasts(pipeline::serial::mark_inter_monitor_duplicates(unified));
    const auto reference = brute_force_flags(unified.records, unified.window_dup_s, unified.window_rebroadcast_s);
    for (std::size_t i = 0; i < marked.records.size(); ++i) {
      mismatches += marked.records[i].flags != reference[i];
      serial_mismatches += serial.records[i].flags != reference[i];
      bit0 += (reference[i] & flags::kInterMonitorDuplicate) != 0;
      bit1 += (reference[i] & flags::kRebroadcast) != 0;
    }
    const auto twice = pipeline::mark_all(marked);
    idempotence_failures += twice.records != marked.records;
    idempotence_failures += pipeline::mark_inter_monitor_duplicates(pipeline::mark_inter_monitor_duplicates(unified))
                                .records != pipeline::mark_inter_monitor_duplicates(unified).records;
    idempotence_failures +=
        pipeline::mark_rebroadcasts(pipeline::mark_rebroadcasts(unified)).records !=
        pipeline::mark_rebroadcasts(unified).records;
    checked += marked.records.size();
  }
  const bool ok = mismatches == 0 && serial_mismatches == 0 && idempotence_failures == 0 && bit0 > 0 && bit1 > 0;
  return {ok, fmt("%zu records in %zu traces: %zu flag mismatches (parallel), %zu (serial), %zu idempotence failures; "
                  "%zu bit0 and %zu bit1 flags exercised",
                  checked, cases.size(), mismatches, serial_mismatches, idempotence_failures, bit0, bit1)};
}

constexpr double kAc6MinShare = 0.5;
constexpr double kAc6Seconds = 60;

Outcome ac6() {
  netsim::SimConfig cfg;
  cfg.n_dht_servers = 300;
  cfg.n_clients = 100;
  cfg.n_monitors = 2;
  cfg.degree_min = 10;
  cfg.degree_max = 30;
  cfg.catalog_size = 2000;
  cfg.popularity_sampler = {netsim::PopularityKind::Zipf, 0.9};
  cfg.request_rate_per_node = 0.004;
  cfg.unresolvable_fraction = 0.3;
  cfg.duration_s = 1800;
  cfg.seed = 6;
  auto net = netsim::build_network(cfg);
  const auto out = netsim::run(net, cfg.duration_s);

  std::size_t gt_wants = 0, gt_rebroadcasts = 0;
  for (const auto& m : out.ground_truth.monitors) {
    gt_wants += m.want_deliveries;
    gt_rebroadcasts += m.rebroadcast_deliveries;
  }
  const auto marked = pipeline::mark_all(pipeline::unify(out.traces));
  std::size_t wants = 0, flagged = 0;
  for (const auto& r : marked.records) {
    if (!is_want(r.request_type)) continue;
    ++wants;
    flagged += r.is_rebroadcast();
  }
  const double gt_share = static_cast<double>(gt_rebroadcasts) / static_cast<double>(std::max<std::size_t>(gt_wants, 1));
  const double share = static_cast<double>(flagged) / static_cast<double>(std::max<std::size_t>(wants, 1));
  const auto dropped = pipeline::filter(marked, false, true, true).records.size();
  return {gt_share > kAc6MinShare && share > kAc6MinShare,
          fmt("unresolvable_fraction %.2f: ground-truth re-broadcast share %.3f, pipeline-flagged share %.3f of %zu "
              "want records (threshold %.2f); %zu wants remain after dropping re-broadcasts",
              cfg.unresolvable_fraction, gt_share, share, wants, kAc6MinShare, dropped)};
}

constexpr TimeNs kAc7CadenceJitterNs = 1'000'000;

Outcome ac7() {
  // (a) single-provider exchange over many latency draws.
  int exchange_ok = 0;
  constexpr int kSeeds = 20;
  for (int seed = 0; seed < kSeeds; ++seed) {
    netsim::SimConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(7000 + seed);
    cfg.record_messages = true;
    netsim::Network net(cfg);
    const auto req = net.add_node(netsim::NodeKind::DhtServer);
    const auto prov = net.add_node(netsim::NodeKind::DhtServer);
    const auto x = net.add_node(netsim::NodeKind::DhtServer);
    const auto y = net.add_node(netsim::NodeKind::DhtClient);
    const auto mon = net.add_node(netsim::NodeKind::Monitor);
    for (auto p : {prov, x, y, mon}) net.connect(req, p);
    const Cid c = hash_content("fig2-" + std::to_string(seed), CodecKind::DagProtobuf);
    net.store_block(prov, c);
    const auto id = net.node_request(req, c);
    net.run_for(10 * kNsPerSecond);

    std::vector<netsim::MessageType> pair_seq;
    std::set<netsim::NodeIndex> want_to, cancel_to, block_want_to;
    for (const auto& e : net.message_log()) {
      if ((e.from == req && e.to == prov) || (e.from == prov && e.to == req)) pair_seq.push_back(e.type);
      if (e.from == req && e.type == netsim::MessageType::WantHave) want_to.insert(e.to);
      if (e.from == req && e.type == netsim::MessageType::Cancel) cancel_to.insert(e.to);
      if (e.from == req && e.type == netsim::MessageType::WantBlock) block_want_to.insert(e.to);
    }
    using MT = netsim::MessageType;
    const std::vector<MT> expected = {MT::WantHave, MT::Have, MT::WantBlock, MT::Block, MT::Cancel};
    const auto& tr = net.trace(mon);
    const bool monitor_view = tr.size() == 2 && tr[0].request_type == RequestType::WantHave &&
                              tr[1].request_type == RequestType::Cancel;
    const bool ok = pair_seq == expected && want_to == std::set<netsim::NodeIndex>{prov, x, y, mon} &&
                    cancel_to == want_to && block_want_to == std::set<netsim::NodeIndex>{prov} &&
                    net.request(id).status == netsim::RequestStatus::Fetched && monitor_view;
    exchange_ok += ok;
  }

  // (b) unresolvable request: WANT_HAVE every 30 s.
  netsim::SimConfig cfg;
  cfg.seed = 77;
  netsim::Network net(cfg);
  const auto req = net.add_node(netsim::NodeKind::DhtServer);
  const auto mon = net.add_node(netsim::NodeKind::Monitor);
  net.connect(req, mon);
  const Cid lost = hash_content("nobody-has-this", CodecKind::Raw);
  net.node_request(req, lost);
  net.run_until(seconds_to_ns(95));
  const auto& tr = net.trace(mon);
  bool cadence = tr.size() == 4;
  TimeNs worst = 0;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const TimeNs gap = tr[i].timestamp_ns - tr[i - 1].timestamp_ns;
    worst = std::max<TimeNs>(worst, std::llabs(gap - seconds_to_ns(cfg.rebroadcast_interval)));
    cadence = cadence && tr[i].request_type == RequestType::WantHave;
  }
  cadence = cadence && worst <= kAc7CadenceJitterNs;

  // (c) monitor passivity across seeds.
  std::size_t monitor_wants = 0, messages = 0;
  constexpr int kPassiveSeeds = 10;
  for (int seed = 0; seed < kPassiveSeeds; ++seed) {
    netsim::SimConfig c;
    c.n_dht_servers = 60;
    c.n_clients = 20;
    c.n_gateways = 1;
    c.gateway_request_rate_per_s = 0.2;
    c.n_monitors = 3;
    c.degree_min = 5;
    c.degree_max = 15;
    c.catalog_size = 100;
    c.request_rate_per_node = 0.02;
    c.unresolvable_fraction = 0.2;
    c.churn = netsim::ChurnModel{300, 60};
    c.record_messages = true;
    c.seed = static_cast<std::uint64_t>(7700 + seed);
    auto n = netsim::build_network(c);
    const auto out = netsim::run(n, 300);
    std::set<NodeId> monitor_ids;
    for (auto m : n.monitors()) monitor_ids.insert(n.node(m).id);
    for (const auto& e : n.message_log()) {
      ++messages;
      const bool want = e.type == netsim::MessageType::WantHave || e.type == netsim::MessageType::WantBlock ||
                        e.type == netsim::MessageType::Cancel;
      monitor_wants += want && n.node(e.from).kind == netsim::NodeKind::Monitor;
    }
    for (const auto& [name, records] : out.traces) {
      for (const auto& r : records) monitor_wants += monitor_ids.contains(r.peer);
    }
  }
  return {exchange_ok == kSeeds && cadence && monitor_wants == 0,
          fmt("single-provider exchange exact in %d/%d seeds; unresolvable request gave %zu WANT_HAVE records, max cadence "
              "deviation %lld ns; monitor-originated wants %zu over %zu messages in %d seeds",
              exchange_ok, kSeeds, tr.size(), static_cast<long long>(worst), monitor_wants, messages, kPassiveSeeds)};
}

constexpr double kAc8AlphaLo = 2.4, kAc8AlphaHi = 2.6;
constexpr double kAc8GeometricP = 0.1;
constexpr int kAc8Seeds = 20, kAc8MinHits = 18;
constexpr double kAc8Seconds = 300;

Outcome ac8() {
  int recovered = 0, rejected = 0;
  double alpha_min = 1e9, alpha_max = 0;
  for (int s = 0; s < kAc8Seeds; ++s) {
    Rng rng(derive_seed(8, static_cast<std::uint64_t>(s)));
    std::vector<std::uint64_t> xs(5000);
    for (auto& x : xs) x = zipf_devroye(rng, 2.5);
    const auto fit = analytics::fit_power_law(xs, analytics::kDefaultBootstraps, static_cast<std::uint64_t>(s));
    alpha_min = std::min(alpha_min, fit.alpha);
    alpha_max = std::max(alpha_max, fit.alpha);
    recovered += fit.alpha >= kAc8AlphaLo && fit.alpha <= kAc8AlphaHi && fit.p_value >= analytics::kPowerLawRejectP;

    std::geometric_distribution<std::uint64_t> geo(kAc8GeometricP);
    for (auto& x : xs) x = 1 + geo(rng);
    const auto g = analytics::fit_power_law(xs, analytics::kDefaultBootstraps, static_cast<std::uint64_t>(s));
    rejected += g.p_value < analytics::kPowerLawRejectP;
  }
  return {recovered >= kAc8MinHits && rejected >= kAc8MinHits,
          fmt("power law alpha=2.5: recovered in %d/%d seeds (alpha range %.3f..%.3f); geometric p=%.2f: rejected in "
              "%d/%d seeds; %u bootstraps each",
              recovered, kAc8Seeds, alpha_min, alpha_max, kAc8GeometricP, rejected, kAc8Seeds,
              analytics::kDefaultBootstraps)};
}

constexpr double kAc9TolPp = 0.5;
constexpr double kAc9Seconds = 60;

Outcome ac9() {
  netsim::SimConfig cfg;
  cfg.n_dht_servers = 1500;
  cfg.n_clients = 500;
  cfg.n_monitors = 1;
  cfg.monitor_connect_prob = 1.0;
  cfg.degree_min = 8;
  cfg.degree_max = 16;
  cfg.catalog_size = 100000;
  cfg.popularity_sampler = {netsim::PopularityKind::Uniform};
  cfg.request_rate_per_node = 0.05;
  cfg.request_process = netsim::RequestProcess::Periodic;
  cfg.unresolvable_fraction = 0;
  cfg.cache_capacity_blocks = 64;
  cfg.duration_s = 600;
  cfg.seed = 9;
  cfg.codec_mix = {{CodecKind::DagProtobuf, 86.21}, {CodecKind::Raw, 13.42}, {CodecKind::DagCBOR, 0.37}};
  cfg.address_plan = {{"3.0.0.0/8", 45.65}, {"31.0.0.0/8", 13.85}, {"5.0.0.0/8", 40.50}};
  auto net = netsim::build_network(cfg);
  const auto out = netsim::run(net, cfg.duration_s);

  const auto marked = pipeline::mark_all(pipeline::unify(out.traces));
  const auto codecs = analytics::codec_share(marked.records);
  analytics::GeoDb db;
  db.add("3.0.0.0/8", "US");
  db.add("31.0.0.0/8", "NL");
  const auto geo = analytics::geo_share(marked.records, db);

  auto share_of = [](const std::vector<analytics::ShareRow>& rows, const std::string& key) {
    for (const auto& r : rows) {
      if (r.key == key) return r.share_pct;
    }
    return 0.0;
  };
  const double pb = share_of(codecs, "DagProtobuf"), raw = share_of(codecs, "Raw");
  const double us = share_of(geo, "US"), nl = share_of(geo, "NL");
  const double worst = std::max({std::fabs(pb - 86.21), std::fabs(raw - 13.42), std::fabs(us - 45.65),
                                 std::fabs(nl - 13.85)});
  std::uint64_t codec_n = 0, geo_n = 0;
  for (const auto& r : codecs) codec_n += r.count;
  for (const auto& r : geo) geo_n += r.count;
  return {worst <= kAc9TolPp,
          fmt("DagProtobuf %.2f%% Raw %.2f%% over %llu wants; US %.2f%% NL %.2f%% over %llu deduplicated wants; max "
              "deviation %.3f pp (tol %.1f)",
              pb, raw, static_cast<unsigned long long>(codec_n), us, nl, static_cast<unsigned long long>(geo_n), worst,
              kAc9TolPp)};
}

constexpr int kAc10Seeds = 50;
constexpr double kAc10Seconds = 120;

Outcome ac10() {
  std::size_t idw_fp = 0, idw_found = 0, probe_fp = 0, complete = 0, tpi_checks = 0, tpi_agree = 0, purge_negatives = 0;
  std::size_t discovered_min = 1000;
  for (int seed = 0; seed < kAc10Seeds; ++seed) {
    netsim::SimConfig cfg;
    cfg.n_dht_servers = 80;
    cfg.n_clients = 30;
    cfg.n_gateways = 2;
    cfg.gateway_backends = {13, 2};
    cfg.gateway_request_rate_per_s = 0;
    cfg.gateway_cache_hit_ratio = 0;
    cfg.n_monitors = 2;
    cfg.degree_min = 5;
    cfg.degree_max = 12;
    cfg.catalog_size = 200;
    cfg.request_rate_per_node = 0.01;
    cfg.unresolvable_fraction = 0.1;
    cfg.seed = static_cast<std::uint64_t>(10000 + seed);
    auto net = netsim::build_network(cfg);

    // Scripted TPI target: a client without own workload.
    netsim::NodeIndex target = 0;
    for (netsim::NodeIndex n = 0; n < net.node_count(); ++n) {
      if (net.node(n).kind == netsim::NodeKind::DhtClient) {
        target = n;
        break;
      }
    }
    net.set_workload(target, false);
    net.start_workload();
    net.run_until(seconds_to_ns(120));

    // IDW soundness against requests issued so far.
    const auto gt = net.ground_truth();
    std::map<Cid, std::set<NodeId>> requesters;
    for (const auto& r : gt.requests_issued) {
      if (r.origin != netsim::RequestOrigin::Gateway || r.status != netsim::RequestStatus::GatewayCacheHit) {
        requesters[r.cid].insert(r.node_id);
      }
    }
    std::map<std::string, std::vector<TraceRecord>> traces;
    for (auto m : net.monitors()) traces[net.node(m).name] = net.trace(m);
    const auto marked = pipeline::mark_all(pipeline::unify(traces));
    for (const auto& item : net.catalog()) {
      for (const auto& hit : probes::idw(marked.records, item.cid)) {
        ++idw_found;
        idw_fp += !requesters[item.cid].contains(hit.peer);
      }
    }

    // Gateway probing.
    std::vector<NodeId> monitors;
    for (auto m : net.monitors()) monitors.push_back(net.node(m).id);
    for (const auto& [dns, backends] : gt.gateway_map) {
      const auto res = probes::saturate_gateway(net, dns, monitors, derive_seed(cfg.seed, dns.size()));
      const std::set<NodeId> truth(backends.begin(), backends.end());
      for (const auto& id : res.discovered_node_ids) probe_fp += !truth.contains(id);
      if (backends.size() == 13) {
        complete += res.discovered_node_ids == truth;
        discovered_min = std::min(discovered_min, res.discovered_node_ids.size());
      }
    }

    // TPI lifecycle: never seen, fetched, purged, re-fetched.
    const auto prober = probes::add_prober(net);
    const NodeId prober_id = net.node(prober).id;
    const NodeId target_id = net.node(target).id;
    Cid c;
    for (const auto& item : net.catalog()) {
      if (item.resolvable && !net.holds(target, item.cid) &&
          std::find(item.providers.begin(), item.providers.end(), target) == item.providers.end()) {
        c = item.cid;
        break;
      }
    }
    auto check = [&](bool expect) {
      const TimeNs t = net.now();
      const bool answer = probes::tpi(net, prober_id, target_id, c);
      const bool truth = net.ground_truth().cached(target_id, c, t);
      ++tpi_checks;
      tpi_agree += answer == truth && truth == expect;
    };
    check(false);
    net.node_request(target, c);
    net.run_for(20 * kNsPerSecond);
    check(true);
    net.purge_cache(target, c);
    const TimeNs t_purged = net.now();
    check(false);
    purge_negatives += !net.ground_truth().cached(target_id, c, t_purged);
    net.node_request(target, c);
    net.run_for(20 * kNsPerSecond);
    check(true);
  }
  const bool ok = idw_fp == 0 && probe_fp == 0 && complete == kAc10Seeds && tpi_agree == tpi_checks &&
                  purge_negatives == kAc10Seeds && idw_found > 0;
  return {ok, fmt("%d seeds: idw %zu hits, %zu false positives; gateway probing %zu false positives, 13/13 backends in "
                  "%zu/%d seeds (min discovered %zu); tpi agreed with cached() in %zu/%zu probes, %zu post-purge "
                  "negatives",
                  kAc10Seeds, idw_found, idw_fp, probe_fp, complete, kAc10Seeds, discovered_min, tpi_agree, tpi_checks,
                  purge_negatives)};
}

constexpr double kAc11Expected = 0.4949, kAc11Tol = 1e-4;

Outcome ac11() {
  const double c = estimators::coverage(7132.56, 14411.42);
  return {std::fabs(c - kAc11Expected) <= kAc11Tol, fmt("coverage %.6f (expected %.4f +- %.0e)", c, kAc11Expected, kAc11Tol)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "estimator cross-consistency", kAc1Seconds, ac1},
      {2, "coupon density normalization and enumeration", kAc2Seconds, ac2},
      {3, "synthetic urn recovery", kAc3Seconds, ac3},
      {4, "DHT min-distance estimator", kAc4Seconds, ac4},
      {5, "pipeline soundness", kAc5Seconds, ac5},
      {6, "re-broadcast share", kAc6Seconds, ac6},
      {7, "protocol fidelity", 0, ac7},
      {8, "popularity power-law fitting", kAc8Seconds, ac8},
      {9, "table-shaped reports", kAc9Seconds, ac9},
      {10, "attack soundness", kAc10Seconds, ac10},
      {11, "coverage arithmetic", 0, ac11},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("AC%-2d %s  %s: %s [%.2f s", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    if (c.limit_s > 0) std::printf(", limit %.0f s", c.limit_s);
    std::printf("]\n");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
