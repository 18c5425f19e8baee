#include "manifest.hpp"

#include <fstream>
#include <iterator>

#include "ipfsmon/core/cid.hpp"
#include "ipfsmon/core/trace_io.hpp"

namespace ipfsmon::cli {

Manifest::Manifest(std::string subcommand)
    : subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {}

void Manifest::add_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  inputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(bytes)}});
}

void Manifest::write(const std::filesystem::path& path) {
  outputs_.push_back(path.string());
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json j{{"tool_version", IPFSMON_VERSION},
                   {"subcommand", subcommand_},
                   {"config", config_},
                   {"config_sha256", sha256_hex(config_.dump())},
                   {"inputs", inputs_},
                   {"outputs", outputs_},
                   {"wall_clock_s", elapsed}};
  write_file_bytes(path, j.dump(2) + "\n");
}

}  // namespace ipfsmon::cli
