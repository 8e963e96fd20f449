#include "spotex/ap_json.hpp"

#include "spotex/error.hpp"

namespace spotex::detail {

nlohmann::ordered_json aps_to_json(const Fingerprint& fp) {
  auto aps = nlohmann::ordered_json::array();
  for (const auto& [mac, obs] : fp.observations()) {
    nlohmann::ordered_json ap;
    ap["ssid"] = obs.ssid();
    ap["mac"] = mac.to_string();
    ap["rssi"] = obs.rssi();
    aps.push_back(std::move(ap));
  }
  return aps;
}

std::vector<ApObservation> aps_from_json(const nlohmann::json& aps) {
  if (!aps.is_array()) throw Error(ErrorCode::malformed_input, "\"aps\" must be an array");
  std::vector<ApObservation> out;
  out.reserve(aps.size());
  for (const auto& ap : aps) {
    if (!ap.is_object()) throw Error(ErrorCode::malformed_input, "ap entry must be an object");
    const auto ssid = require_string(ap, "ssid");
    const auto mac = MacAddress::parse(require_string(ap, "mac"));
    auto it = ap.find("rssi");
    if (it == ap.end() || !it->is_number_integer()) {
      throw Error(ErrorCode::malformed_input, "ap entry needs integer \"rssi\"");
    }
    const auto rssi = it->get<std::int64_t>();
    if (rssi < kMinRssi || rssi > kMaxRssi) {
      throw Error(ErrorCode::invalid_rssi, "rssi " + std::to_string(rssi) + " outside [-100, 0]");
    }
    out.emplace_back(ssid, mac, static_cast<int>(rssi));
  }
  return out;
}

Timestamp require_timestamp(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::malformed_input, std::string("missing integer field \"") + key + "\"");
  }
  return it->get<Timestamp>();
}

std::string require_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::malformed_input, std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace spotex::detail
