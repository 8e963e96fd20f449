#pragma once

#include <cstdint>
#include <set>

#include "spotex/fingerprint.hpp"
#include "spotex/proxlog.hpp"

namespace spotex {

/// Tuning for co-movement detection.
struct GroupParams {
  std::int64_t delta_ms = 0;  // time tolerance when matching measurements
  double omega_db = 0.0;      // RSSI tolerance for comparability
  Timestamp t0 = 0;           // query time
  std::int64_t t_max_ms = 0;  // how far back the co-travel must extend

  /// Throws Error(invalid_group_params) unless delta > 0, omega > 0 and t_max >= delta.
  void validate() const;
};

/// One member of the shrinking candidate set.
struct GroupCandidate {
  MacAddress client;
  Timestamp latest_t = 0;
  Fingerprint latest_env;
  bool updated = false;
};

/// Clients that travelled with `client` from t0 back to t0 - t_max.
///
/// Seeds candidates with each other client's latest record in [t0 - delta, t0]
/// that is comparable with `start_env`, then walks the querying client's own
/// measurements backwards. At each step a candidate survives only if it has a
/// record within t +/- delta (capped at t0) and that record is comparable
/// with the querying client's environment at t. The walk stops when it passes
/// t0 - t_max, when the client has no earlier measurement, or when no
/// candidate is left.
///
/// Throws Error(no_anchor_measurement) if `client` has no record at or before t0.
std::set<MacAddress> detect_group(const LogStore& store, const MacAddress& client, const Fingerprint& start_env,
                                  const GroupParams& params);

/// Reference implementation of detect_group: evaluates every other client
/// independently against the full anchor chain using exhaustive scans of the
/// raw record sequence.
std::set<MacAddress> brute_force_group(const LogStore& store, const MacAddress& client,
                                       const Fingerprint& start_env, const GroupParams& params);

/// True if `client` travelled with at least n people (itself included) for at
/// least t_seconds ending at `now`. False when the client has no measurement
/// at or before `now`.
bool in_group_of(const LogStore& store, const MacAddress& client, std::int64_t n, std::int64_t t_seconds,
                 Timestamp now, std::int64_t delta_ms, double omega_db);

}  // namespace spotex
