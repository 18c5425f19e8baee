#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "ipfsmon/analytics/analytics.hpp"
#include "ipfsmon/core/trace_io.hpp"
#include "ipfsmon/estimators/estimators.hpp"
#include "ipfsmon/netsim/network.hpp"
#include "ipfsmon/probes/probes.hpp"
#include "manifest.hpp"

namespace ipfsmon::cli {

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file_bytes(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

netsim::SimConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  auto cfg = netsim::config_from_json(read_json(path));
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

std::vector<TraceRecord> load_trace(const std::string& path) {
  try {
    return read_trace_file(path);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<ConnEvent> load_conn(const std::string& path) {
  try {
    return read_conn_file(path);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

pipeline::UnifiedTrace load_unified(const std::vector<std::string>& inputs, const WindowOptions& w,
                                    Manifest& manifest) {
  if (inputs.empty()) throw UsageError("no trace files given");
  if (!(w.dup_window_s >= 0) || !(w.rebroadcast_window_s >= 0)) throw UsageError("windows must be non-negative");
  std::vector<std::vector<TraceRecord>> traces;
  for (const auto& path : inputs) {
    traces.push_back(load_trace(path));
    manifest.add_input(path);
  }
  pipeline::UnifiedTrace t;
  try {
    t = pipeline::unify(traces);
  } catch (const pipeline::UnsortedTrace& e) {
    throw UsageError(e.what());
  }
  t.window_dup_s = w.dup_window_s;
  t.window_rebroadcast_s = w.rebroadcast_window_s;
  return pipeline::mark_all(std::move(t));
}

nlohmann::json windows_json(const WindowOptions& w) {
  return {{"dup_window_s", w.dup_window_s}, {"rebroadcast_window_s", w.rebroadcast_window_s}};
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

fs::path manifest_path(const fs::path& out) { return out.string() + ".manifest.json"; }

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  write_file_bytes(path, text);
}

std::unordered_map<NodeId, std::string, NodeIdHash> read_gateway_map(const std::string& path) {
  std::unordered_map<NodeId, std::string, NodeIdHash> groups;
  std::istringstream in(read_file_bytes(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line.starts_with("peer_id"))) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw UsageError(path + ": line " + std::to_string(line_no) + ": expected peer_id,group");
    try {
      groups[NodeId::from_hex(line.substr(0, comma))] = line.substr(comma + 1);
    } catch (const std::invalid_argument& e) {
      throw UsageError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return groups;
}

Cid parse_cid_flag(const std::string& text) {
  try {
    return Cid::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--cid: ") + e.what());
  }
}

NodeId parse_node_flag(const std::string& flag, const std::string& text) {
  try {
    return NodeId::from_hex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

}  // namespace

int cmd_simulate(const SimulateOptions& o) {
  Manifest manifest("simulate");
  auto cfg = load_config(o.config, o.seed);
  if (o.duration_s) cfg.duration_s = *o.duration_s;
  cfg.validate();
  manifest.add_input(o.config);
  manifest.set_config(netsim::config_to_json(cfg));

  auto net = netsim::build_network(cfg);
  const auto out = netsim::run(net, cfg.duration_s);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  for (const auto& [name, records] : out.traces) {
    const auto p = dir / (name + ".trace.csv");
    write_trace_file(records, p);
    manifest.add_output(p);
  }
  for (const auto& [name, events] : out.conn_events) {
    const auto p = dir / (name + ".conn.csv");
    write_conn_file(events, p);
    manifest.add_output(p);
  }
  const auto gt_path = dir / "ground_truth.json";
  write_text(gt_path, netsim::ground_truth_to_json(out.ground_truth).dump(2) + "\n");
  manifest.add_output(gt_path);

  std::ostringstream gmap;
  gmap << "peer_id,group\n";
  for (const auto& [id, group] : out.ground_truth.origin_groups) gmap << id.to_hex() << ',' << group << '\n';
  const auto gmap_path = dir / "gateway_map.csv";
  write_text(gmap_path, gmap.str());
  manifest.add_output(gmap_path);
  manifest.write(dir / "manifest.json");

  std::cout << "nodes " << out.ground_truth.true_n << ", requests " << out.ground_truth.requests_issued.size()
            << '\n';
  for (const auto& m : out.ground_truth.monitors) {
    std::cout << m.name << ": " << m.trace_records << " trace records, " << m.conn_events << " connection events\n";
  }
  return 0;
}

int cmd_unify(const UnifyOptions& o) {
  Manifest manifest("unify");
  manifest.set_config({{"windows", windows_json(o.windows)},
                       {"drop_dups", o.drop_dups},
                       {"drop_rebroadcasts", o.drop_rebroadcasts},
                       {"drop_cancels", o.drop_cancels}});
  auto t = load_unified(o.inputs, o.windows, manifest);
  const auto total = t.records.size();
  const auto dups = std::count_if(t.records.begin(), t.records.end(), [](const auto& r) { return r.is_duplicate(); });
  const auto rebroadcasts =
      std::count_if(t.records.begin(), t.records.end(), [](const auto& r) { return r.is_rebroadcast(); });
  t = pipeline::filter(std::move(t), o.drop_dups, o.drop_rebroadcasts, o.drop_cancels);
  ensure_parent(o.out);
  write_trace_file(t.records, o.out);
  manifest.add_output(o.out);
  manifest.write(manifest_path(o.out));
  std::cout << "records " << total << ", inter-monitor duplicates " << dups << ", re-broadcasts " << rebroadcasts
            << ", written " << t.records.size() << '\n';
  return 0;
}

int cmd_analyze(const AnalyzeOptions& o) {
  static const std::vector<std::string> kReports = {"popularity", "ecdf",     "power-law",
                                                    "codec-share", "geo-share", "rate"};
  if (std::find(kReports.begin(), kReports.end(), o.report) == kReports.end()) {
    throw UsageError("unknown report '" + o.report + "'");
  }
  const bool raw_default = o.report == "codec-share" || o.report == "rate";
  const std::string records = o.records.empty() ? (raw_default ? "raw" : "dedup") : o.records;
  if (records != "raw" && records != "dedup") throw UsageError("--records must be raw or dedup");

  Manifest manifest("analyze");
  nlohmann::json config{{"report", o.report}, {"records", records}, {"windows", windows_json(o.windows)}};
  auto t = load_unified(o.inputs, o.windows, manifest);
  if (records == "dedup") t = pipeline::filter(std::move(t), true, true, false);
  const auto& recs = t.records;

  std::ostringstream out;
  if (o.report == "popularity") {
    analytics::write_popularity_csv(out, analytics::popularity(recs, false));
  } else if (o.report == "ecdf" || o.report == "power-law") {
    if (o.score != "rrp" && o.score != "urp") throw UsageError("--score must be rrp or urp");
    config["score"] = o.score;
    std::vector<std::uint64_t> scores;
    for (const auto& [cid, e] : analytics::popularity(recs, false).entries) {
      scores.push_back(o.score == "rrp" ? e.rrp : e.urp);
    }
    if (scores.empty()) throw UsageError("trace contains no want records");
    if (o.report == "ecdf") {
      analytics::write_ecdf_csv(out, analytics::ecdf(scores));
    } else {
      if (o.bootstraps == 0) throw UsageError("--bootstraps must be at least 1");
      config["bootstraps"] = o.bootstraps;
      config["seed"] = o.seed;
      const auto fit = analytics::fit_power_law(scores, o.bootstraps, o.seed);
      out << analytics::to_json(fit).dump(2) << '\n';
      std::cout << "alpha " << fit.alpha << ", x_min " << fit.x_min << ", KS " << fit.ks_statistic << ", p "
                << fit.p_value << (fit.p_value < analytics::kPowerLawRejectP ? " (rejected)" : "") << '\n';
    }
  } else if (o.report == "codec-share") {
    const auto rows = analytics::codec_share(recs);
    analytics::write_share_csv(out, "codec", rows);
    analytics::write_share_table(std::cout, "codec", rows);
  } else if (o.report == "geo-share") {
    if (o.geo_db.empty()) throw UsageError("geo-share needs --geo-db");
    manifest.add_input(o.geo_db);
    analytics::GeoDb db;
    try {
      db = analytics::GeoDb::read_csv_file(o.geo_db);
    } catch (const std::invalid_argument& e) {
      throw UsageError(o.geo_db + ": " + e.what());
    }
    const auto rows = analytics::geo_share(recs, db);
    analytics::write_share_csv(out, "country", rows);
    analytics::write_share_table(std::cout, "country", rows);
  } else {
    if (o.group_by != "request-type" && o.group_by != "origin") {
      throw UsageError("--group-by must be request-type or origin");
    }
    config["bucket_s"] = o.bucket_s;
    config["group_by"] = o.group_by;
    config["include_cancels"] = o.include_cancels;
    std::unordered_map<NodeId, std::string, NodeIdHash> groups;
    if (!o.gateway_map.empty()) {
      groups = read_gateway_map(o.gateway_map);
      manifest.add_input(o.gateway_map);
    }
    std::vector<TraceRecord> selected;
    for (const auto& r : recs) {
      if (o.include_cancels || is_want(r.request_type)) selected.push_back(r);
    }
    const auto series = analytics::rate_timeseries(
        selected, o.bucket_s,
        o.group_by == "origin" ? analytics::GroupBy::OriginGroup : analytics::GroupBy::RequestType, groups);
    analytics::write_rate_csv(out, series);
    analytics::write_rate_table(std::cout, series);
  }

  manifest.set_config(config);
  write_text(o.out, out.str());
  manifest.add_output(o.out);
  manifest.write(manifest_path(o.out));
  return 0;
}

int cmd_estimate(const EstimateOptions& o) {
  Manifest manifest("estimate");
  nlohmann::json config{{"method", o.method}};
  nlohmann::json result;
  estimators::SizeEstimate est;

  auto stats_from_inputs = [&]() -> std::optional<estimators::PeerSetStats> {
    if (!o.stats.empty()) {
      manifest.add_input(o.stats);
      try {
        return estimators::peer_set_stats_from_json(read_json(o.stats));
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(o.stats + ": " + e.what());
      }
    }
    if (o.conn.empty()) return std::nullopt;
    std::map<std::string, std::vector<ConnEvent>> events;
    TimeNs last = 0;
    for (const auto& path : o.conn) {
      manifest.add_input(path);
      for (auto& e : load_conn(path)) {
        last = std::max(last, e.timestamp_ns);
        events[e.monitor].push_back(std::move(e));
      }
    }
    const TimeNs t0 = o.t0_s ? seconds_to_ns(*o.t0_s) : 0;
    const TimeNs t1 = o.t1_s ? seconds_to_ns(*o.t1_s) : last;
    config["t0_ns"] = t0;
    config["t1_ns"] = t1;
    config["sample_interval_s"] = o.sample_interval_s;
    return estimators::peer_set_stats(events, t0, t1, o.sample_interval_s);
  };

  if (o.method == "two-monitor") {
    std::uint64_t p1, p2, inter;
    if (o.p1 && o.p2 && o.inter) {
      p1 = *o.p1;
      p2 = *o.p2;
      inter = *o.inter;
    } else {
      auto s = stats_from_inputs();
      if (!s) throw UsageError("two-monitor needs --p1/--p2/--inter, --stats or --conn");
      if (s->r < 2 || s->intersections.size() < 2) throw UsageError("two-monitor needs two monitors");
      result["stats"] = estimators::to_json(*s);
      p1 = s->sizes[0];
      p2 = s->sizes[1];
      inter = s->intersections[0][1];
    }
    result["inputs"] = {{"p1", p1}, {"p2", p2}, {"inter", inter}};
    est = estimators::estimate_two_monitor(p1, p2, inter);
  } else if (o.method == "coupon") {
    std::uint64_t m, r;
    double w;
    if (o.m && o.r && o.w) {
      m = *o.m;
      r = *o.r;
      w = *o.w;
    } else {
      auto s = stats_from_inputs();
      if (!s) throw UsageError("coupon needs --m/--r/--w, --stats or --conn");
      result["stats"] = estimators::to_json(*s);
      m = s->union_size;
      r = s->r;
      w = s->w;
    }
    result["inputs"] = {{"m", m}, {"r", r}, {"w", w}};
    est = estimators::solve_coupon_mle(m, r, w);
  } else if (o.method == "dht-min") {
    std::vector<double> xs;
    if (!o.distances.empty()) {
      manifest.add_input(o.distances);
      std::istringstream in(read_file_bytes(o.distances));
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line == "distance")) continue;
        std::size_t used = 0;
        double x = 0;
        try {
          x = std::stod(line, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != line.size()) throw UsageError(o.distances + ": line " + std::to_string(line_no) + ": not a number");
        xs.push_back(x);
      }
    } else if (!o.sim.empty()) {
      manifest.add_input(o.sim);
      const auto cfg = load_config(o.sim, std::nullopt);
      config["sim"] = netsim::config_to_json(cfg);
      config["samples"] = o.samples;
      config["seed"] = o.seed;
      const auto net = netsim::build_network(cfg);
      Rng rng(o.seed);
      std::vector<NodeId> targets;
      for (std::size_t i = 0; i < o.samples; ++i) targets.push_back(NodeId::random(rng));
      xs = net.sample_min_distances(targets);
      result["true_n_dht_servers"] = net.dht_server_ids().size();
    } else {
      throw UsageError("dht-min needs --distances or --sim");
    }
    result["inputs"] = {{"k", xs.size()}};
    est = estimators::dht_size_from_min_distance(xs);
  } else {
    throw UsageError("unknown method '" + o.method + "'");
  }

  result["estimate"] = estimators::to_json(est);
  manifest.set_config(config);
  write_text(o.out, result.dump(2) + "\n");
  manifest.add_output(o.out);
  manifest.write(manifest_path(o.out));
  std::cout << to_token(est.method) << " estimate: " << est.n_hat << '\n';
  return 0;
}

int cmd_probe_gateways(const ProbeOptions& o) {
  Manifest manifest("probe-gateways");
  const auto cfg = load_config(o.sim, o.seed);
  manifest.add_input(o.sim);
  manifest.set_config({{"sim", netsim::config_to_json(cfg)},
                       {"warmup_s", o.warmup_s},
                       {"window_s", o.window_s},
                       {"rounds", o.rounds},
                       {"max_probes", o.max_probes}});
  if (cfg.n_monitors == 0) throw UsageError("gateway probing needs at least one monitor in the sim config");
  if (!(o.window_s > 0) || o.rounds == 0 || o.max_probes == 0) throw UsageError("window, rounds and probes must be positive");

  auto net = netsim::build_network(cfg);
  net.start_workload();
  net.run_for(seconds_to_ns(o.warmup_s));
  std::vector<NodeId> monitors;
  for (auto m : net.monitors()) monitors.push_back(net.node(m).id);

  std::vector<probes::GatewayProbeResult> results;
  std::uint64_t stream = 0;
  for (const auto& [dns, backends] : net.gateways()) {
    results.push_back(probes::saturate_gateway(net, dns, monitors, derive_seed(cfg.seed, 0x9a7e + stream++), o.rounds,
                                               o.max_probes, o.window_s));
  }

  std::ostringstream report;
  report << "dns_name,peer_id,probes_sent,http_succeeded\n";
  std::cout << "gateway  probes  http ok  discovered  backends\n";
  for (const auto& r : results) {
    const auto ok = std::count(r.http_succeeded.begin(), r.http_succeeded.end(), true);
    if (r.discovered_node_ids.empty()) report << r.dns_name << ",," << r.probes_sent << ',' << ok << '\n';
    for (const auto& id : r.discovered_node_ids) {
      report << r.dns_name << ',' << id.to_hex() << ',' << r.probes_sent << ',' << ok << '\n';
    }
    std::cout << r.dns_name << "  " << r.probes_sent << "  " << ok << "  " << r.discovered_node_ids.size() << "  "
              << net.gateways().at(r.dns_name).size() << '\n';
  }
  write_text(o.out, report.str());
  manifest.add_output(o.out);

  if (!o.xref.empty()) {
    std::vector<TraceRecord> observed;
    for (auto m : net.monitors()) {
      const auto& tr = net.trace(m);
      observed.insert(observed.end(), tr.begin(), tr.end());
    }
    std::ostringstream xref;
    probes::write_cross_reference_csv(xref, probes::cross_reference(results, observed));
    write_text(o.xref, xref.str());
    manifest.add_output(o.xref);
  }
  manifest.write(manifest_path(o.out));
  return 0;
}

int cmd_idw(const IdwOptions& o) {
  Manifest manifest("idw");
  const auto cid = parse_cid_flag(o.cid);
  manifest.set_config({{"cid", o.cid}, {"windows", windows_json(o.windows)}});
  const auto t = load_unified(o.inputs, o.windows, manifest);
  std::ostringstream out;
  out << "peer_id,first_seen_ns\n";
  for (const auto& i : probes::idw(t.records, cid)) out << i.peer.to_hex() << ',' << i.first_seen << '\n';
  if (o.out.empty()) {
    std::cout << out.str();
    return 0;
  }
  write_text(o.out, out.str());
  manifest.add_output(o.out);
  manifest.write(manifest_path(o.out));
  return 0;
}

int cmd_tnw(const TnwOptions& o) {
  Manifest manifest("tnw");
  const auto peer = parse_node_flag("--peer", o.peer);
  manifest.set_config({{"peer", o.peer}, {"windows", windows_json(o.windows)}});
  const auto t = load_unified(o.inputs, o.windows, manifest);
  std::ostringstream out;
  out << "timestamp_ns,request_type,cid\n";
  for (const auto& w : probes::tnw(t.records, peer)) {
    out << w.timestamp_ns << ',' << to_token(w.request_type) << ',' << w.cid.to_string() << '\n';
  }
  if (o.out.empty()) {
    std::cout << out.str();
    return 0;
  }
  write_text(o.out, out.str());
  manifest.add_output(o.out);
  manifest.write(manifest_path(o.out));
  return 0;
}

int cmd_tpi(const TpiOptions& o) {
  Manifest manifest("tpi");
  const auto cfg = load_config(o.sim, o.seed);
  const auto target = parse_node_flag("--target", o.target);
  const auto cid = parse_cid_flag(o.cid);
  const double at_s = o.at_s.value_or(cfg.duration_s);
  manifest.add_input(o.sim);
  manifest.set_config({{"sim", netsim::config_to_json(cfg)}, {"target", o.target}, {"cid", o.cid}, {"at_s", at_s}});

  auto net = netsim::build_network(cfg);
  net.start_workload();
  net.run_until(seconds_to_ns(at_s));
  if (!net.find_node(target)) throw UsageError("--target: no such node in the simulated network");
  const auto prober = probes::add_prober(net);
  const TimeNs probe_time = net.now();
  const bool answer = probes::tpi(net, net.node(prober).id, target, cid);
  const bool truth = net.ground_truth().cached(target, cid, probe_time);

  nlohmann::json result{{"target", o.target},
                        {"cid", o.cid},
                        {"probe_time_ns", probe_time},
                        {"answer", answer},
                        {"ground_truth_cached", truth}};
  std::cout << (answer ? "true" : "false") << '\n';
  if (o.out.empty()) return 0;
  write_text(o.out, result.dump(2) + "\n");
  manifest.add_output(o.out);
  manifest.write(manifest_path(o.out));
  return 0;
}

}  // namespace ipfsmon::cli
