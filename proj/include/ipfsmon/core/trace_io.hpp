#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipfsmon/core/trace.hpp"

namespace ipfsmon {

/// Malformed input. `line()` is 1-based and counts the header line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kTraceHeader =
    "timestamp_ns,monitor,peer_id,address,request_type,cid_codec,cid_digest_hex,flags";
inline constexpr std::string_view kConnHeader = "timestamp_ns,monitor,peer_id,kind";

void write_trace(const std::vector<TraceRecord>& records, std::ostream& out);
std::vector<TraceRecord> read_trace(std::istream& in);

void write_conn_events(const std::vector<ConnEvent>& events, std::ostream& out);
std::vector<ConnEvent> read_conn_events(std::istream& in);

// File variants; a ".gz" suffix selects gzip compression.
void write_trace_file(const std::vector<TraceRecord>& records, const std::filesystem::path& path);
std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path);
void write_conn_file(const std::vector<ConnEvent>& events, const std::filesystem::path& path);
std::vector<ConnEvent> read_conn_file(const std::filesystem::path& path);

/// Whole-file helpers honouring the ".gz" suffix.
std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace ipfsmon
