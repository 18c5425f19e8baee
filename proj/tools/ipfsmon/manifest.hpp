#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ipfsmon::cli {

/// Reproducibility record written next to every run's outputs.
class Manifest {
 public:
  explicit Manifest(std::string subcommand);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }
  void write(const std::filesystem::path& path);

 private:
  std::string subcommand_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace ipfsmon::cli
