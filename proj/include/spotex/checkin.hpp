#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spotex/fingerprint.hpp"
#include "spotex/metrics.hpp"

namespace spotex {

inline constexpr std::int64_t kDefaultCheckinTtlMs = std::chrono::milliseconds(std::chrono::minutes(15)).count();

struct CheckInRecord {
  std::string identity;  // opaque account id supplied by the caller
  Fingerprint fingerprint;
  Timestamp expires_at = 0;
  std::map<std::string, std::int64_t> attrs;

  /// Record expiring `ttl_ms` after the fingerprint was taken.
  static CheckInRecord with_ttl(std::string identity, Fingerprint fp, std::int64_t ttl_ms = kDefaultCheckinTtlMs,
                                std::map<std::string, std::int64_t> attrs = {});

  friend bool operator==(const CheckInRecord&, const CheckInRecord&) = default;
};

struct NearbyCheckIn {
  std::string identity;
  double distance = 0.0;
};

/// Temporal check-in store keyed by identity. Places exist only as the
/// fingerprints attached to records; there are no coordinates.
class CheckInRegistry {
 public:
  /// Stores rec, replacing an older record for the same identity; a record
  /// older than the stored one is ignored. Throws Error(invalid_checkin) for
  /// an empty identity or expires_at <= fingerprint.t, and
  /// Error(already_expired) when expires_at <= now.
  void register_checkin(CheckInRecord rec, Timestamp now);

  /// Unexpired records that share at least one AP mac with `probe` and lie
  /// within `threshold` under `metric`, nearest first (ties by identity).
  /// Throws Error(invalid_threshold) for a negative threshold.
  [[nodiscard]] std::vector<NearbyCheckIn> nearby_checkins(const Fingerprint& probe, Metric metric, double threshold,
                                                           Timestamp now) const;

  /// Drops every record with expires_at <= now. Returns how many were removed.
  std::size_t expire(Timestamp now);

  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
  [[nodiscard]] const CheckInRecord* find(const std::string& identity) const;
  [[nodiscard]] const std::map<std::string, CheckInRecord>& records() const noexcept { return records_; }

 private:
  std::map<std::string, CheckInRecord> records_;
};

/// {"identity": "...", "t": <ms>, "expires_at": <ms>, "attrs": {...}, "aps": [...]}
std::string to_jsonl_line(const CheckInRecord& rec);
CheckInRecord parse_checkin_line(std::string_view line);

void save_registry(const CheckInRegistry& registry, std::ostream& out);
/// Records are loaded as-is (no expiry check), so stale files can still be expired.
CheckInRegistry load_registry(std::istream& in);

}  // namespace spotex
