#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "ipfsmon/analytics/analytics.hpp"
#include "ipfsmon/core/rng.hpp"
#include "ipfsmon/netsim/network.hpp"
#include "ipfsmon/pipeline/pipeline.hpp"

using namespace ipfsmon;

namespace {

pipeline::UnifiedTrace make_trace(std::size_t n) {
  Rng rng(1);
  std::vector<NodeId> peers;
  for (int i = 0; i < 500; ++i) peers.push_back(NodeId::random(rng));
  std::vector<Cid> cids;
  for (int i = 0; i < 2000; ++i) cids.push_back(hash_content(std::to_string(i), CodecKind::Raw));
  std::map<std::string, std::vector<TraceRecord>> traces;
  for (std::size_t i = 0; i < n; ++i) {
    TraceRecord r;
    r.monitor = rng() % 2 ? "de1" : "us1";
    r.timestamp_ns = static_cast<TimeNs>(i) * 10'000'000;
    r.peer = peers[rng() % peers.size()];
    r.cid = cids[rng() % cids.size()];
    r.request_type = static_cast<RequestType>(rng() % 3);
    traces[r.monitor].push_back(r);
  }
  return pipeline::unify(traces);
}

std::vector<std::uint64_t> zipf_sample(std::size_t n) {
  Rng rng(2);
  std::vector<std::uint64_t> xs(n);
  for (auto& x : xs) x = static_cast<std::uint64_t>(std::floor(std::pow(1 - unit_interval(rng()), -1 / 1.5)));
  return xs;
}

void BM_MarkParallel(benchmark::State& state) {
  const auto t = make_trace(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::mark_all(t));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MarkSerial(benchmark::State& state) {
  const auto t = make_trace(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pipeline::serial::mark_rebroadcasts(pipeline::serial::mark_inter_monitor_duplicates(t)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct DistanceInput {
  std::vector<U256> servers;
  std::vector<NodeId> targets;
};

DistanceInput distance_input(std::size_t servers) {
  Rng rng(3);
  DistanceInput in;
  for (std::size_t i = 0; i < servers; ++i) in.servers.push_back(NodeId::random(rng).value());
  for (int i = 0; i < 1000; ++i) in.targets.push_back(NodeId::random(rng));
  return in;
}

void BM_MinDistanceParallel(benchmark::State& state) {
  const auto in = distance_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(netsim::min_distances(in.servers, in.targets));
}

void BM_MinDistanceSerial(benchmark::State& state) {
  const auto in = distance_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(netsim::serial::min_distances(in.servers, in.targets));
}

void BM_PowerLawParallel(benchmark::State& state) {
  const auto xs = zipf_sample(5000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::fit_power_law(xs, static_cast<std::uint32_t>(state.range(0)), 1));
  }
}

void BM_PowerLawSerial(benchmark::State& state) {
  const auto xs = zipf_sample(5000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::serial::fit_power_law(xs, static_cast<std::uint32_t>(state.range(0)), 1));
  }
}

}  // namespace

BENCHMARK(BM_MarkParallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarkSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinDistanceParallel)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinDistanceSerial)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerLawParallel)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerLawSerial)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
