#include <arpa/inet.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "ipfsmon/analytics/analytics.hpp"

namespace ipfsmon::analytics {

namespace {

std::uint32_t prefix_mask(int len) { return len == 0 ? 0 : ~std::uint32_t{0} << (32 - len); }

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::optional<std::uint32_t> parse_ipv4_address(std::string_view address) {
  std::string_view host = address;
  if (host.starts_with("/ip4/")) {
    host.remove_prefix(5);
    host = host.substr(0, host.find('/'));
  } else {
    host = host.substr(0, host.find(':'));
  }
  const std::string text(host);
  in_addr a{};
  if (inet_pton(AF_INET, text.c_str(), &a) != 1) return std::nullopt;
  return ntohl(a.s_addr);
}

void GeoDb::add(std::string_view cidr, std::string country) {
  const auto slash = cidr.find('/');
  if (slash == std::string_view::npos) throw std::invalid_argument("CIDR without prefix length: " + std::string(cidr));
  const auto ip = parse_ipv4_address(cidr.substr(0, slash));
  const std::string len_text(cidr.substr(slash + 1));
  std::size_t used = 0;
  int len = -1;
  try {
    len = std::stoi(len_text, &used);
  } catch (const std::exception&) {
    len = -1;
  }
  if (!ip || used != len_text.size() || len < 0 || len > 32) {
    throw std::invalid_argument("malformed CIDR: " + std::string(cidr));
  }
  auto [it, fresh] = by_len_[static_cast<std::size_t>(len)].insert_or_assign(*ip & prefix_mask(len), std::move(country));
  if (fresh) ++size_;
}

std::optional<std::string> GeoDb::lookup(std::uint32_t ip) const {
  for (int len = 32; len >= 0; --len) {
    const auto& table = by_len_[static_cast<std::size_t>(len)];
    if (table.empty()) continue;
    if (auto it = table.find(ip & prefix_mask(len)); it != table.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<std::string> GeoDb::lookup_address(std::string_view address) const {
  auto ip = parse_ipv4_address(address);
  if (!ip) return std::nullopt;
  return lookup(*ip);
}

GeoDb GeoDb::read_csv(std::istream& in) {
  GeoDb db;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.starts_with('#')) continue;
    if (line_no == 1 && t.starts_with("cidr")) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("geo db line " + std::to_string(line_no) + ": expected cidr,country");
    }
    try {
      db.add(trim(std::string_view(t).substr(0, comma)), trim(std::string_view(t).substr(comma + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("geo db line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return db;
}

GeoDb GeoDb::read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

std::vector<ShareRow> geo_share(std::span<const TraceRecord> records, const GeoDb& db) {
  if (db.empty()) throw std::invalid_argument("geo_share needs a non-empty geo database");
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (const auto& r : records) {
    if (!is_want(r.request_type) || r.flags != 0) continue;
    ++counts[db.lookup_address(r.address).value_or(kUnknownCountry)];
    ++total;
  }
  std::vector<ShareRow> rows;
  for (auto& [k, c] : counts) rows.push_back({k, c, 100.0 * static_cast<double>(c) / static_cast<double>(total)});
  std::stable_sort(rows.begin(), rows.end(), [](const ShareRow& a, const ShareRow& b) { return a.count > b.count; });
  return rows;
}

}  // namespace ipfsmon::analytics
