#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipfsmon/pipeline/pipeline.hpp"

namespace ipfsmon::cli {

/// Bad flags or unusable input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WindowOptions {
  double dup_window_s = pipeline::kDefaultDupWindowS;
  double rebroadcast_window_s = pipeline::kDefaultRebroadcastWindowS;
};

struct SimulateOptions {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
};

struct UnifyOptions {
  std::vector<std::string> inputs;
  std::string out;
  WindowOptions windows;
  bool drop_dups = false;
  bool drop_rebroadcasts = false;
  bool drop_cancels = false;
};

struct AnalyzeOptions {
  std::string report;
  std::vector<std::string> inputs;
  std::string out;
  WindowOptions windows;
  std::string records;  // "dedup" or "raw"; empty = report default
  std::string score = "urp";
  std::uint32_t bootstraps = 250;
  std::uint64_t seed = 0;
  double bucket_s = 3600;
  std::string group_by = "request-type";
  bool include_cancels = false;
  std::string geo_db;
  std::string gateway_map;
};

struct EstimateOptions {
  std::string method;
  std::string out;
  std::string stats;
  std::vector<std::string> conn;
  std::optional<double> t0_s;
  std::optional<double> t1_s;
  double sample_interval_s = 60;
  std::optional<std::uint64_t> p1, p2, inter, m, r;
  std::optional<double> w;
  std::string distances;
  std::string sim;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

struct ProbeOptions {
  std::string sim;
  std::string out;
  std::string xref;
  std::optional<std::uint64_t> seed;
  double warmup_s = 0;
  double window_s = 30;
  std::size_t rounds = 5;
  std::size_t max_probes = 200;
};

struct IdwOptions {
  std::string cid;
  std::vector<std::string> inputs;
  std::string out;
  WindowOptions windows;
};

struct TnwOptions {
  std::string peer;
  std::vector<std::string> inputs;
  std::string out;
  WindowOptions windows;
};

struct TpiOptions {
  std::string sim;
  std::string target;
  std::string cid;
  std::optional<double> at_s;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_simulate(const SimulateOptions& o);
int cmd_unify(const UnifyOptions& o);
int cmd_analyze(const AnalyzeOptions& o);
int cmd_estimate(const EstimateOptions& o);
int cmd_probe_gateways(const ProbeOptions& o);
int cmd_idw(const IdwOptions& o);
int cmd_tnw(const TnwOptions& o);
int cmd_tpi(const TpiOptions& o);

}  // namespace ipfsmon::cli
