#include "spotex/mac_address.hpp"

#include <optional>

#include "spotex/error.hpp"

namespace spotex {
namespace {

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::optional<MacAddress::Octets> try_parse(std::string_view text) noexcept {
  // "xx:xx:xx:xx:xx:xx"
  if (text.size() != 17) return std::nullopt;
  MacAddress::Octets octets{};
  const char sep = text[2];
  if (sep != ':' && sep != '-') return std::nullopt;
  for (std::size_t i = 0; i < 6; ++i) {
    const std::size_t pos = i * 3;
    const int hi = hex_value(text[pos]);
    const int lo = hex_value(text[pos + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    if (i < 5 && text[pos + 2] != sep) return std::nullopt;
    octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return octets;
}

}  // namespace

MacAddress MacAddress::parse(std::string_view text) {
  if (auto octets = try_parse(text)) return MacAddress(*octets);
  throw Error(ErrorCode::invalid_mac, "invalid mac address '" + std::string(text) + "'");
}

bool MacAddress::is_valid(std::string_view text) noexcept { return try_parse(text).has_value(); }

std::string MacAddress::to_string() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(17);
  for (std::size_t i = 0; i < octets_.size(); ++i) {
    if (i != 0) out.push_back(':');
    out.push_back(digits[octets_[i] >> 4]);
    out.push_back(digits[octets_[i] & 0x0f]);
  }
  return out;
}

std::uint64_t MacAddress::to_u64() const noexcept {
  std::uint64_t value = 0;
  for (auto octet : octets_) value = (value << 8) | octet;
  return value;
}

}  // namespace spotex
