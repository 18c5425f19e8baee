#include "ipfsmon/core/cid.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <memory>
#include <stdexcept>

namespace ipfsmon {

namespace {

struct CodecName {
  CodecKind kind;
  std::string_view name;
};

constexpr std::array<CodecName, 6> kCodecNames{{
    {CodecKind::DagProtobuf, "DagProtobuf"},
    {CodecKind::Raw, "Raw"},
    {CodecKind::DagCBOR, "DagCBOR"},
    {CodecKind::DagJSON, "DagJSON"},
    {CodecKind::GitRaw, "GitRaw"},
    {CodecKind::EthereumTx, "EthereumTx"},
}};

constexpr std::string_view kOtherPrefix = "Other-";

}  // namespace

std::string Codec::name() const {
  if (kind == CodecKind::Other) return std::string(kOtherPrefix) + std::to_string(code);
  for (const auto& n : kCodecNames) {
    if (n.kind == kind) return std::string(n.name);
  }
  return "Unknown";
}

Codec Codec::parse(std::string_view name) {
  for (const auto& n : kCodecNames) {
    if (n.name == name) return Codec(n.kind);
  }
  if (name.starts_with(kOtherPrefix)) {
    const auto digits = name.substr(kOtherPrefix.size());
    std::uint64_t code = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), code);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) {
      return Codec::other(code);
    }
  }
  throw std::invalid_argument("unknown codec '" + std::string(name) + "'");
}

std::string Cid::to_string() const { return codec.name() + ":" + digest.to_hex(); }

Cid Cid::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("CID must have the form <codec>:<hex>");
  }
  return Cid{Codec::parse(text.substr(0, colon)), U256::from_hex(text.substr(colon + 1))};
}

Cid hash_content(std::span<const std::uint8_t> bytes, Codec codec) {
  std::array<std::uint8_t, 32> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return Cid{codec, U256::from_bytes(md.data())};
}

Cid hash_content(std::string_view bytes, Codec codec) {
  return hash_content(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()), codec);
}

}  // namespace ipfsmon

namespace ipfsmon {

std::string sha256_hex(std::string_view bytes) { return hash_content(bytes, CodecKind::Raw).digest.to_hex(); }

}  // namespace ipfsmon
