#include <CLI11.hpp>
#include <iostream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "ipfsmon/analytics/analytics.hpp"
#include "ipfsmon/core/trace_io.hpp"
#include "ipfsmon/estimators/estimators.hpp"
#include "ipfsmon/netsim/config.hpp"
#include "ipfsmon/pipeline/pipeline.hpp"
#include "ipfsmon/probes/probes.hpp"

using namespace ipfsmon::cli;

namespace {

void add_windows(CLI::App* cmd, WindowOptions& w) {
  cmd->add_option("--dup-window-s", w.dup_window_s, "Inter-monitor duplicate window in seconds")
      ->capture_default_str();
  cmd->add_option("--rebroadcast-window-s", w.rebroadcast_window_s, "Per-monitor re-broadcast window in seconds")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Passive BitSwap monitoring toolkit: simulate, unify, analyze, estimate, probe"};
  app.set_version_flag("--version", IPFSMON_VERSION);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Run the network simulator and write monitor traces");
  c_sim->add_option("--config", sim.config, "Simulation config (JSON)")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out_dir, "Output directory")->required();
  c_sim->add_option("--seed", sim.seed, "Override the config seed");
  c_sim->add_option("--duration-s", sim.duration_s, "Override the config duration");

  UnifyOptions uni;
  auto* c_uni = app.add_subcommand("unify", "Merge monitor traces and flag duplicates and re-broadcasts");
  c_uni->add_option("inputs", uni.inputs, "Trace CSV files")->required()->check(CLI::ExistingFile);
  c_uni->add_option("--out", uni.out, "Unified trace CSV")->required();
  add_windows(c_uni, uni.windows);
  c_uni->add_flag("--drop-dups", uni.drop_dups, "Remove inter-monitor duplicates");
  c_uni->add_flag("--drop-rebroadcasts", uni.drop_rebroadcasts, "Remove re-broadcasts");
  c_uni->add_flag("--drop-cancels", uni.drop_cancels, "Remove CANCEL records");

  AnalyzeOptions ana;
  auto* c_ana = app.add_subcommand("analyze", "Popularity, distribution fit and share/rate reports");
  c_ana->add_option("--report", ana.report, "popularity | ecdf | power-law | codec-share | geo-share | rate")
      ->required();
  c_ana->add_option("inputs", ana.inputs, "Trace CSV files")->required()->check(CLI::ExistingFile);
  c_ana->add_option("--out", ana.out, "Report file (CSV, or JSON for power-law)")->required();
  add_windows(c_ana, ana.windows);
  c_ana->add_option("--records", ana.records,
                    "raw | dedup (default: raw for codec-share and rate, dedup otherwise)");
  c_ana->add_option("--score", ana.score, "Popularity score for ecdf/power-law: rrp | urp")->capture_default_str();
  c_ana->add_option("--bootstraps", ana.bootstraps, "Power-law bootstrap replicates")->capture_default_str();
  c_ana->add_option("--seed", ana.seed, "Bootstrap seed")->capture_default_str();
  c_ana->add_option("--bucket-s", ana.bucket_s, "Rate bucket length in seconds")->capture_default_str();
  c_ana->add_option("--group-by", ana.group_by, "Rate grouping: request-type | origin")->capture_default_str();
  c_ana->add_flag("--include-cancels", ana.include_cancels, "Count CANCEL records in rate series");
  c_ana->add_option("--geo-db", ana.geo_db, "CSV cidr,country")->check(CLI::ExistingFile);
  c_ana->add_option("--gateway-map", ana.gateway_map, "CSV peer_id,group")->check(CLI::ExistingFile);

  EstimateOptions est;
  auto* c_est = app.add_subcommand("estimate", "Network size estimation");
  c_est->add_option("--method", est.method, "two-monitor | coupon | dht-min")->required();
  c_est->add_option("--out", est.out, "Result JSON")->required();
  c_est->add_option("--stats", est.stats, "Peer-set statistics JSON")->check(CLI::ExistingFile);
  c_est->add_option("--conn", est.conn, "Connection event CSV files")->check(CLI::ExistingFile);
  c_est->add_option("--t0-s", est.t0_s, "Window start (default 0)");
  c_est->add_option("--t1-s", est.t1_s, "Window end (default last event)");
  c_est->add_option("--sample-interval-s", est.sample_interval_s, "Connection count sampling period")
      ->capture_default_str();
  c_est->add_option("--p1", est.p1, "Peers seen by monitor 1");
  c_est->add_option("--p2", est.p2, "Peers seen by monitor 2");
  c_est->add_option("--inter", est.inter, "Peers seen by both");
  c_est->add_option("--m", est.m, "Union of peer sets");
  c_est->add_option("--r", est.r, "Number of monitors");
  c_est->add_option("--w", est.w, "Mean connections per monitor");
  c_est->add_option("--distances", est.distances, "Normalized closest-peer distances, one per line")
      ->check(CLI::ExistingFile);
  c_est->add_option("--sim", est.sim, "Sample distances from this simulation config")->check(CLI::ExistingFile);
  c_est->add_option("--samples", est.samples, "Distance samples drawn with --sim")->capture_default_str();
  c_est->add_option("--seed", est.seed, "Seed for distance targets")->capture_default_str();

  ProbeOptions prb;
  auto* c_prb = app.add_subcommand("probe-gateways", "Identify gateway overlay nodes with bait CIDs");
  c_prb->add_option("--sim", prb.sim, "Simulation config (JSON)")->required()->check(CLI::ExistingFile);
  c_prb->add_option("--out", prb.out, "Report CSV")->required();
  c_prb->add_option("--xref", prb.xref, "Cross-reference CSV of ids and addresses");
  c_prb->add_option("--seed", prb.seed, "Override the config seed");
  c_prb->add_option("--warmup-s", prb.warmup_s, "Simulated time before probing")->capture_default_str();
  c_prb->add_option("--window-s", prb.window_s, "Observation window per probe")->capture_default_str();
  c_prb->add_option("--rounds", prb.rounds, "Stop after this many probes without new ids")->capture_default_str();
  c_prb->add_option("--max-probes", prb.max_probes, "Probe limit per gateway")->capture_default_str();

  IdwOptions idw;
  auto* c_idw = app.add_subcommand("idw", "Peers that requested a CID");
  c_idw->add_option("--cid", idw.cid, "CID as <codec>:<hex digest>")->required();
  c_idw->add_option("inputs", idw.inputs, "Trace CSV files")->required()->check(CLI::ExistingFile);
  c_idw->add_option("--out", idw.out, "Output CSV (default stdout)");
  add_windows(c_idw, idw.windows);

  TnwOptions tnw;
  auto* c_tnw = app.add_subcommand("tnw", "Requests issued by one peer");
  c_tnw->add_option("--peer", tnw.peer, "Peer id (64 hex chars)")->required();
  c_tnw->add_option("inputs", tnw.inputs, "Trace CSV files")->required()->check(CLI::ExistingFile);
  c_tnw->add_option("--out", tnw.out, "Output CSV (default stdout)");
  add_windows(c_tnw, tnw.windows);

  TpiOptions tpi;
  auto* c_tpi = app.add_subcommand("tpi", "Test whether a simulated node holds a CID");
  c_tpi->add_option("--sim", tpi.sim, "Simulation config (JSON)")->required()->check(CLI::ExistingFile);
  c_tpi->add_option("--target", tpi.target, "Target peer id (64 hex chars)")->required();
  c_tpi->add_option("--cid", tpi.cid, "CID as <codec>:<hex digest>")->required();
  c_tpi->add_option("--at-s", tpi.at_s, "Probe time (default: config duration)");
  c_tpi->add_option("--seed", tpi.seed, "Override the config seed");
  c_tpi->add_option("--out", tpi.out, "Result JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_uni->parsed()) return cmd_unify(uni);
    if (c_ana->parsed()) return cmd_analyze(ana);
    if (c_est->parsed()) return cmd_estimate(est);
    if (c_prb->parsed()) return cmd_probe_gateways(prb);
    if (c_idw->parsed()) return cmd_idw(idw);
    if (c_tnw->parsed()) return cmd_tnw(tnw);
    if (c_tpi->parsed()) return cmd_tpi(tpi);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ipfsmon::netsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ipfsmon::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ipfsmon::estimators::DisjointSamples& e) {
    std::cerr << "DisjointSamples: " << e.what() << '\n';
    return 2;
  } catch (const ipfsmon::estimators::DegenerateSample& e) {
    std::cerr << "DegenerateSample: " << e.what() << '\n';
    return 2;
  } catch (const ipfsmon::analytics::DegenerateSample& e) {
    std::cerr << "DegenerateSample: " << e.what() << '\n';
    return 2;
  } catch (const ipfsmon::probes::ProbeUnreachable& e) {
    std::cerr << "ProbeUnreachable: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
