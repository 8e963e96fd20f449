#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spotex/fingerprint.hpp"
#include "spotex/proxlog.hpp"

namespace spotex {

inline constexpr double kDefaultPathLossExponent = 3.0;
inline constexpr double kDefaultTxRefDbm = -40.0;
inline constexpr int kDefaultVisibilityFloorDbm = -95;
inline constexpr double kDefaultNoiseSigmaDb = 2.0;
inline constexpr std::int64_t kDefaultScanPeriodMs = 2000;
inline constexpr double kMinSeparationM = 0.1;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct AccessPoint {
  std::string ssid;
  MacAddress mac;
  Point position;
  double tx_ref_dbm = kDefaultTxRefDbm;  // received power at 1 m
};

struct Venue {
  std::vector<AccessPoint> aps;
};

struct Waypoint {
  Timestamp t = 0;
  Point position;
};

struct ClientPath {
  MacAddress mac;
  std::vector<Waypoint> path;  // time-ordered
};

struct Scenario {
  Venue venue;
  std::vector<ClientPath> clients;
  std::int64_t scan_period_ms = kDefaultScanPeriodMs;
  std::uint64_t seed = 0;
  double noise_sigma_db = kDefaultNoiseSigmaDb;
  int visibility_floor_dbm = kDefaultVisibilityFloorDbm;
  double path_loss_exponent = kDefaultPathLossExponent;

  /// Throws Error(invalid_scenario) describing the first violated constraint.
  void validate() const;
};

/// Log-distance path loss: tx_ref - 10 * exponent * log10(d) + noise, clamped
/// to [-100, 0] dBm. Distances below 0.1 m are raised to 0.1 m.
double rssi_model(double distance_m, double tx_ref_dbm, double noise_db,
                  double exponent = kDefaultPathLossExponent);

/// Standard normal samples from mt19937_64 through the basic Box-Muller
/// transform (cosine branch only, one sample per pair of draws). Both the
/// engine and the transform are fully specified, so a seed reproduces the
/// same stream on every platform with an IEEE-754 libm.
class GaussianNoise {
 public:
  GaussianNoise(std::uint64_t seed, double sigma) : engine_(seed), sigma_(sigma) {}

  double next();

 private:
  std::mt19937_64 engine_;
  double sigma_;
};

/// Position along a waypoint path at time t, linearly interpolated and held
/// constant outside the path's time span.
Point position_at(const std::vector<Waypoint>& path, Timestamp t);

/// One scan per client every scan_period_ms from its first to its last
/// waypoint time. Noise is drawn per (client, scan, AP) in scenario order.
/// Result is in global time order, clients in scenario order at equal times.
std::vector<LogRecord> simulate(const Scenario& scenario);

LogStore to_store(const std::vector<LogRecord>& records);

/// JSON scenario document, "schema": 1. Parse errors report line and column.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

}  // namespace spotex
