#include "spotex/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spotex/error.hpp"

namespace spotex {

void Scenario::validate() const {
  const auto bad = [](const std::string& what) { throw Error(ErrorCode::invalid_scenario, what); };
  if (scan_period_ms <= 0) bad("scan_period_ms must be positive");
  if (!std::isfinite(noise_sigma_db) || noise_sigma_db < 0.0) bad("noise_sigma_db must be >= 0");
  if (!std::isfinite(path_loss_exponent) || path_loss_exponent <= 0.0) bad("path_loss_exponent must be positive");
  if (visibility_floor_dbm < kMinRssi || visibility_floor_dbm > kMaxRssi) bad("visibility_floor_dbm outside [-100, 0]");

  std::set<MacAddress> ap_macs;
  for (const auto& ap : venue.aps) {
    if (!ap_macs.insert(ap.mac).second) bad("duplicate access point mac " + ap.mac.to_string());
    if (!std::isfinite(ap.position.x) || !std::isfinite(ap.position.y) || !std::isfinite(ap.tx_ref_dbm)) {
      bad("access point " + ap.mac.to_string() + " has a non-finite position or tx_ref");
    }
  }
  std::set<MacAddress> client_macs;
  for (const auto& client : clients) {
    const auto name = client.mac.to_string();
    if (!client_macs.insert(client.mac).second) bad("duplicate client mac " + name);
    if (client.path.empty()) bad("client " + name + " has no waypoints");
    for (std::size_t i = 0; i < client.path.size(); ++i) {
      const auto& wp = client.path[i];
      if (!std::isfinite(wp.position.x) || !std::isfinite(wp.position.y)) {
        bad("client " + name + " has a non-finite waypoint");
      }
      if (i > 0 && wp.t < client.path[i - 1].t) bad("waypoints of client " + name + " are not time-ordered");
    }
  }
}

double rssi_model(double distance_m, double tx_ref_dbm, double noise_db, double exponent) {
  const double d = std::max(distance_m, kMinSeparationM);
  const double value = tx_ref_dbm - 10.0 * exponent * std::log10(d) + noise_db;
  return std::clamp(value, static_cast<double>(kMinRssi), static_cast<double>(kMaxRssi));
}

double GaussianNoise::next() {
  if (sigma_ == 0.0) return 0.0;
  constexpr double scale = 0x1.0p-53;
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * scale;  // (0, 1]
  const double u2 = static_cast<double>(engine_() >> 11) * scale;          // [0, 1)
  return sigma_ * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Point position_at(const std::vector<Waypoint>& path, Timestamp t) {
  if (path.empty()) return {};
  if (t <= path.front().t) return path.front().position;
  if (t >= path.back().t) return path.back().position;
  auto next = std::upper_bound(path.begin(), path.end(), t, [](Timestamp v, const Waypoint& w) { return v < w.t; });
  const auto& b = *next;
  const auto& a = *std::prev(next);
  if (b.t == a.t) return b.position;
  const double f = static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
  return {a.position.x + f * (b.position.x - a.position.x), a.position.y + f * (b.position.y - a.position.y)};
}

std::vector<LogRecord> simulate(const Scenario& scenario) {
  scenario.validate();
  GaussianNoise noise(scenario.seed, scenario.noise_sigma_db);

  std::vector<LogRecord> out;
  for (const auto& client : scenario.clients) {
    const Timestamp first = client.path.front().t;
    const Timestamp last = client.path.back().t;
    for (Timestamp t = first; t <= last; t += scenario.scan_period_ms) {
      const Point at = position_at(client.path, t);
      std::vector<ApObservation> heard;
      for (const auto& ap : scenario.venue.aps) {
        const double d = std::hypot(at.x - ap.position.x, at.y - ap.position.y);
        const double sample = noise.next();
        const auto rssi =
            static_cast<int>(std::lround(rssi_model(d, ap.tx_ref_dbm, sample, scenario.path_loss_exponent)));
        if (rssi < scenario.visibility_floor_dbm) continue;
        heard.emplace_back(ap.ssid, ap.mac, rssi);
      }
      out.push_back({client.mac, Fingerprint(t, heard)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const LogRecord& l, const LogRecord& r) { return l.t() < r.t(); });
  return out;
}

LogStore to_store(const std::vector<LogRecord>& records) {
  LogStore store;
  for (const auto& rec : records) store.append(rec);
  return store;
}

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::invalid_scenario, where + ": " + what);
}

const json& field(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const json& obj, const std::string& where, const char* key) {
  const auto& v = field(obj, where, key);
  if (!v.is_number()) schema_error(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

std::int64_t integer(const json& obj, const std::string& where, const char* key) {
  const auto& v = field(obj, where, key);
  if (!v.is_number_integer()) schema_error(where + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& obj, const std::string& where, const char* key) {
  const auto& v = field(obj, where, key);
  if (!v.is_string()) schema_error(where + "." + key, "expected a string");
  return v.get<std::string>();
}

MacAddress mac_field(const json& obj, const std::string& where, const char* key) {
  const auto value = text(obj, where, key);
  if (!MacAddress::is_valid(value)) schema_error(where + "." + key, "invalid mac address '" + value + "'");
  return MacAddress::parse(value);
}

const json& array(const json& obj, const std::string& where, const char* key) {
  const auto& v = field(obj, where, key);
  if (!v.is_array()) schema_error(where + "." + key, "expected an array");
  return v;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the 1-based offset of the offending byte.
    const auto [line, column] = line_column(json_text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::invalid_scenario,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": malformed JSON");
  }
  if (!doc.is_object()) schema_error("$", "scenario must be a JSON object");
  if (integer(doc, "$", "schema") != 1) schema_error("$.schema", "unsupported schema version");

  Scenario s;
  const auto& seed = field(doc, "$", "seed");
  if (!seed.is_number_unsigned()) schema_error("$.seed", "expected an unsigned integer");
  s.seed = seed.get<std::uint64_t>();
  s.scan_period_ms = doc.contains("scan_period_ms") ? integer(doc, "$", "scan_period_ms") : kDefaultScanPeriodMs;
  s.noise_sigma_db = number_or(doc, "$", "noise_sigma_db", kDefaultNoiseSigmaDb);
  s.visibility_floor_dbm =
      doc.contains("visibility_floor_dbm") ? static_cast<int>(integer(doc, "$", "visibility_floor_dbm"))
                                           : kDefaultVisibilityFloorDbm;
  s.path_loss_exponent = number_or(doc, "$", "path_loss_exponent", kDefaultPathLossExponent);

  const auto& venue = field(doc, "$", "venue");
  if (!venue.is_object()) schema_error("$.venue", "expected an object");
  const auto& aps = array(venue, "$.venue", "aps");
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const auto where = "$.venue.aps[" + std::to_string(i) + "]";
    if (!aps[i].is_object()) schema_error(where, "expected an object");
    AccessPoint ap;
    ap.ssid = text(aps[i], where, "ssid");
    ap.mac = mac_field(aps[i], where, "mac");
    ap.position = {number(aps[i], where, "x"), number(aps[i], where, "y")};
    ap.tx_ref_dbm = number_or(aps[i], where, "tx_ref_dbm", kDefaultTxRefDbm);
    s.venue.aps.push_back(std::move(ap));
  }

  const auto& clients = array(doc, "$", "clients");
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const auto where = "$.clients[" + std::to_string(i) + "]";
    if (!clients[i].is_object()) schema_error(where, "expected an object");
    ClientPath client;
    client.mac = mac_field(clients[i], where, "mac");
    const auto& path = array(clients[i], where, "path");
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto wp_where = where + ".path[" + std::to_string(k) + "]";
      if (!path[k].is_object()) schema_error(wp_where, "expected an object");
      client.path.push_back(
          {integer(path[k], wp_where, "t"), {number(path[k], wp_where, "x"), number(path[k], wp_where, "y")}});
    }
    s.clients.push_back(std::move(client));
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_scenario, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["seed"] = scenario.seed;
  doc["scan_period_ms"] = scenario.scan_period_ms;
  doc["noise_sigma_db"] = scenario.noise_sigma_db;
  doc["visibility_floor_dbm"] = scenario.visibility_floor_dbm;
  doc["path_loss_exponent"] = scenario.path_loss_exponent;
  auto aps = nlohmann::ordered_json::array();
  for (const auto& ap : scenario.venue.aps) {
    aps.push_back({{"ssid", ap.ssid},
                   {"mac", ap.mac.to_string()},
                   {"x", ap.position.x},
                   {"y", ap.position.y},
                   {"tx_ref_dbm", ap.tx_ref_dbm}});
  }
  doc["venue"]["aps"] = std::move(aps);
  auto clients = nlohmann::ordered_json::array();
  for (const auto& client : scenario.clients) {
    auto path = nlohmann::ordered_json::array();
    for (const auto& wp : client.path) path.push_back({{"t", wp.t}, {"x", wp.position.x}, {"y", wp.position.y}});
    clients.push_back({{"mac", client.mac.to_string()}, {"path", std::move(path)}});
  }
  doc["clients"] = std::move(clients);
  return doc.dump(2);
}

}  // namespace spotex
