#include "ipfsmon/core/trace_io.hpp"

#include <zlib.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace ipfsmon {

namespace {

bool has_gz_suffix(const std::filesystem::path& path) { return path.extension() == ".gz"; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <class Int>
Int parse_int(std::string_view field, std::size_t line, const char* what) {
  Int value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

void check_text_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\r\n") != std::string::npos) {
    throw std::invalid_argument(std::string(what) + " must not contain commas or newlines: '" + s + "'");
  }
}

// Strips a trailing '\r' so files edited on Windows still parse.
std::string_view chomp(const std::string& line) {
  std::string_view v(line);
  if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
  return v;
}

template <class Row, class ParseRow>
std::vector<Row> read_csv(std::istream& in, std::string_view header, ParseRow parse_row) {
  std::vector<Row> rows;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (chomp(line) != header) throw ParseError(1, "unexpected header '" + line + "'");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = chomp(line);
    if (view.empty()) continue;
    rows.push_back(parse_row(split_fields(view), line_no));
  }
  return rows;
}

}  // namespace

void write_trace(const std::vector<TraceRecord>& records, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : records) {
    check_text_field(r.monitor, "monitor");
    check_text_field(r.address, "address");
    out << r.timestamp_ns << ',' << r.monitor << ',' << r.peer.to_hex() << ',' << r.address << ','
        << to_token(r.request_type) << ',' << r.cid.codec.name() << ',' << r.cid.digest.to_hex() << ','
        << static_cast<unsigned>(r.flags) << '\n';
  }
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  return read_csv<TraceRecord>(in, kTraceHeader, [](const std::vector<std::string_view>& f, std::size_t line) {
    if (f.size() != 8) {
      throw ParseError(line, "expected 8 fields, got " + std::to_string(f.size()));
    }
    TraceRecord r;
    r.timestamp_ns = parse_int<TimeNs>(f[0], line, "timestamp_ns");
    r.monitor = std::string(f[1]);
    r.address = std::string(f[3]);
    const auto flag_value = parse_int<unsigned>(f[7], line, "flags");
    if (flag_value > 3) throw ParseError(line, "flags out of range: " + std::string(f[7]));
    r.flags = static_cast<std::uint8_t>(flag_value);
    try {
      r.peer = NodeId::from_hex(f[2]);
      r.request_type = parse_request_type(f[4]);
      r.cid = Cid{Codec::parse(f[5]), U256::from_hex(f[6])};
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
    return r;
  });
}

void write_conn_events(const std::vector<ConnEvent>& events, std::ostream& out) {
  out << kConnHeader << '\n';
  for (const auto& e : events) {
    check_text_field(e.monitor, "monitor");
    out << e.timestamp_ns << ',' << e.monitor << ',' << e.peer.to_hex() << ',' << to_token(e.kind) << '\n';
  }
}

std::vector<ConnEvent> read_conn_events(std::istream& in) {
  return read_csv<ConnEvent>(in, kConnHeader, [](const std::vector<std::string_view>& f, std::size_t line) {
    if (f.size() != 4) {
      throw ParseError(line, "expected 4 fields, got " + std::to_string(f.size()));
    }
    ConnEvent e;
    e.timestamp_ns = parse_int<TimeNs>(f[0], line, "timestamp_ns");
    e.monitor = std::string(f[1]);
    try {
      e.peer = NodeId::from_hex(f[2]);
      e.kind = parse_conn_kind(f[3]);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(line, ex.what());
    }
    return e;
  });
}

std::string read_file_bytes(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("no such file: " + path.string());
  }
  if (!has_gz_suffix(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  gzFile gz = gzopen(path.c_str(), "rb");
  if (gz == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(gz, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(gz);
  if (failed) throw std::runtime_error("gzip read error in " + path.string());
  return out;
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  if (!has_gz_suffix(path)) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << bytes;
    return;
  }
  gzFile gz = gzopen(path.c_str(), "wb");
  if (gz == nullptr) throw std::runtime_error("cannot write " + path.string());
  const int written = bytes.empty() ? 0 : gzwrite(gz, bytes.data(), static_cast<unsigned>(bytes.size()));
  gzclose(gz);
  if (static_cast<std::size_t>(written) != bytes.size()) {
    throw std::runtime_error("gzip write error in " + path.string());
  }
}

void write_trace_file(const std::vector<TraceRecord>& records, const std::filesystem::path& path) {
  std::ostringstream out;
  write_trace(records, out);
  write_file_bytes(path, out.str());
}

std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path) {
  std::istringstream in(read_file_bytes(path));
  return read_trace(in);
}

void write_conn_file(const std::vector<ConnEvent>& events, const std::filesystem::path& path) {
  std::ostringstream out;
  write_conn_events(events, out);
  write_file_bytes(path, out.str());
}

std::vector<ConnEvent> read_conn_file(const std::filesystem::path& path) {
  std::istringstream in(read_file_bytes(path));
  return read_conn_events(in);
}

}  // namespace ipfsmon
