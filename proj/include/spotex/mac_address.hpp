#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace spotex {

/// 48-bit hardware address. Parsing accepts either case and ':' or '-'
/// separators; the canonical text form is lowercase "aa:bb:cc:dd:ee:ff".
class MacAddress {
 public:
  using Octets = std::array<std::uint8_t, 6>;

  constexpr MacAddress() = default;
  constexpr explicit MacAddress(const Octets& octets) : octets_(octets) {}

  /// Throws Error(invalid_mac) unless `text` is exactly six hex octets.
  static MacAddress parse(std::string_view text);
  static bool is_valid(std::string_view text) noexcept;

  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] const Octets& octets() const noexcept { return octets_; }
  [[nodiscard]] std::uint64_t to_u64() const noexcept;

  // Octet-wise ordering coincides with lexicographic order of the canonical text.
  friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;

 private:
  Octets octets_{};
};

}  // namespace spotex

template <>
struct std::hash<spotex::MacAddress> {
  std::size_t operator()(const spotex::MacAddress& mac) const noexcept {
    return std::hash<std::uint64_t>{}(mac.to_u64());
  }
};
