#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spotex/mac_address.hpp"

namespace spotex {

/// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr int kMinRssi = -100;
inline constexpr int kMaxRssi = 0;

/// RSSI substituted for an access point that one side of a comparison did not hear.
inline constexpr double kMissingApFill = -100.0;

/// One heard access point: network name, radio address and signal strength.
class ApObservation {
 public:
  /// Throws Error(invalid_rssi) when rssi lies outside [-100, 0].
  ApObservation(std::string ssid, MacAddress mac, int rssi);

  [[nodiscard]] const std::string& ssid() const noexcept { return ssid_; }
  [[nodiscard]] const MacAddress& mac() const noexcept { return mac_; }
  [[nodiscard]] int rssi() const noexcept { return rssi_; }

  friend bool operator==(const ApObservation&, const ApObservation&) = default;

 private:
  std::string ssid_;
  MacAddress mac_;
  int rssi_;
};

/// A timestamped wireless environment. Observations are keyed by mac, so
/// iteration order is lexicographic by address.
class Fingerprint {
 public:
  using Observations = std::map<MacAddress, ApObservation>;

  Fingerprint() = default;
  /// Throws Error(duplicate_mac) if two observations share a mac.
  Fingerprint(Timestamp t, std::span<const ApObservation> observations);
  Fingerprint(Timestamp t, std::initializer_list<ApObservation> observations);

  [[nodiscard]] Timestamp t() const noexcept { return t_; }
  [[nodiscard]] const Observations& observations() const noexcept { return observations_; }
  [[nodiscard]] const ApObservation* find(const MacAddress& mac) const;
  [[nodiscard]] bool empty() const noexcept { return observations_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return observations_.size(); }

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  Timestamp t_ = 0;
  Observations observations_;
};

/// Mean signal strength per access point over a fixed, ordered universe.
class SignalVector {
 public:
  using Entries = std::map<MacAddress, double>;

  SignalVector() = default;
  /// Throws Error(invalid_rssi) for positive or non-finite entries.
  explicit SignalVector(Entries entries);

  /// Wraps a single scan without averaging.
  static SignalVector from_fingerprint(const Fingerprint& fp);

  [[nodiscard]] const Entries& entries() const noexcept { return entries_; }
  [[nodiscard]] std::vector<MacAddress> universe() const;
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const SignalVector&, const SignalVector&) = default;

 private:
  Entries entries_;
};

/// Two equal-length vectors over the union of both universes.
struct AlignedVectors {
  std::vector<MacAddress> universe;
  std::vector<double> a;
  std::vector<double> b;
};

/// Per-AP arithmetic mean over the scans in which that AP was heard. Scans
/// that missed an AP do not pull its mean down; the fill value is applied
/// later, by align().
/// Throws Error(no_scans) on an empty list.
SignalVector average_vector(std::span<const Fingerprint> scans);

AlignedVectors align(const SignalVector& a, const SignalVector& b, double fill = kMissingApFill);

/// True iff some mac is heard by both with |rssi_a - rssi_b| < omega.
/// Throws Error(invalid_threshold) when omega <= 0.
bool comparable(const Fingerprint& a, const Fingerprint& b, double omega);

/// True iff the two fingerprints hear at least one common mac.
bool shares_access_point(const Fingerprint& a, const Fingerprint& b);

}  // namespace spotex
