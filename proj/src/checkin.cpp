#include "spotex/checkin.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include "spotex/ap_json.hpp"
#include "spotex/error.hpp"

namespace spotex {

CheckInRecord CheckInRecord::with_ttl(std::string identity, Fingerprint fp, std::int64_t ttl_ms,
                                      std::map<std::string, std::int64_t> attrs) {
  const Timestamp expires = fp.t() + ttl_ms;
  return CheckInRecord{std::move(identity), std::move(fp), expires, std::move(attrs)};
}

namespace {

void validate(const CheckInRecord& rec) {
  if (rec.identity.empty()) throw Error(ErrorCode::invalid_checkin, "check-in identity must not be empty");
  if (rec.expires_at <= rec.fingerprint.t()) {
    throw Error(ErrorCode::invalid_checkin, "check-in for '" + rec.identity + "' expires before it was taken");
  }
}

}  // namespace

void CheckInRegistry::register_checkin(CheckInRecord rec, Timestamp now) {
  validate(rec);
  if (rec.expires_at <= now) throw Error(ErrorCode::already_expired, "already expired");
  auto it = records_.find(rec.identity);
  if (it == records_.end()) {
    records_.emplace(rec.identity, std::move(rec));
  } else if (rec.fingerprint.t() >= it->second.fingerprint.t()) {
    it->second = std::move(rec);
  }
}

std::vector<NearbyCheckIn> CheckInRegistry::nearby_checkins(const Fingerprint& probe, Metric metric,
                                                            double threshold, Timestamp now) const {
  if (!(threshold >= 0.0)) throw Error(ErrorCode::invalid_threshold, "invalid threshold");
  const auto probe_vector = SignalVector::from_fingerprint(probe);

  std::vector<NearbyCheckIn> out;
  for (const auto& [identity, rec] : records_) {
    if (rec.expires_at <= now) continue;
    // No shared AP means no proximity at all, whatever the filled-in distance says.
    if (!shares_access_point(probe, rec.fingerprint)) continue;
    const double d = distance(probe_vector, SignalVector::from_fingerprint(rec.fingerprint), metric).value;
    if (d <= threshold) out.push_back({identity, d});
  }
  std::sort(out.begin(), out.end(), [](const NearbyCheckIn& l, const NearbyCheckIn& r) {
    if (l.distance != r.distance) return l.distance < r.distance;
    return l.identity < r.identity;
  });
  return out;
}

std::size_t CheckInRegistry::expire(Timestamp now) {
  return std::erase_if(records_, [now](const auto& entry) { return entry.second.expires_at <= now; });
}

const CheckInRecord* CheckInRegistry::find(const std::string& identity) const {
  auto it = records_.find(identity);
  return it == records_.end() ? nullptr : &it->second;
}

std::string to_jsonl_line(const CheckInRecord& rec) {
  nlohmann::ordered_json j;
  j["identity"] = rec.identity;
  j["t"] = rec.fingerprint.t();
  j["expires_at"] = rec.expires_at;
  j["attrs"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : rec.attrs) j["attrs"][key] = value;
  j["aps"] = detail::aps_to_json(rec.fingerprint);
  return j.dump();
}

CheckInRecord parse_checkin_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_input, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::malformed_input, "check-in must be a JSON object");

  CheckInRecord rec;
  rec.identity = detail::require_string(j, "identity");
  const auto t = detail::require_timestamp(j, "t");
  rec.expires_at = detail::require_timestamp(j, "expires_at");
  if (auto it = j.find("attrs"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::malformed_input, "\"attrs\" must be an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_number_integer()) {
        throw Error(ErrorCode::malformed_input, "attribute \"" + key + "\" must be an integer");
      }
      rec.attrs.emplace(key, value.get<std::int64_t>());
    }
  }
  auto aps = j.find("aps");
  if (aps == j.end()) throw Error(ErrorCode::malformed_input, "missing field \"aps\"");
  rec.fingerprint = Fingerprint(t, detail::aps_from_json(*aps));
  validate(rec);
  return rec;
}

void save_registry(const CheckInRegistry& registry, std::ostream& out) {
  for (const auto& entry : registry.records()) out << to_jsonl_line(entry.second) << '\n';
}

CheckInRegistry load_registry(std::istream& in) {
  CheckInRegistry registry;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    try {
      auto rec = parse_checkin_line(line);
      // Bypass the arrival-time expiry check; expired rows are dropped by expire().
      registry.register_checkin(std::move(rec), std::numeric_limits<Timestamp>::min());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return registry;
}

}  // namespace spotex
