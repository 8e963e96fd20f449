#pragma once

#include <vector>

#include "json.hpp"
#include "spotex/fingerprint.hpp"

namespace spotex::detail {

// Shared by the scan-log and check-in registry codecs, which use the same
// AP object shape.
nlohmann::ordered_json aps_to_json(const Fingerprint& fp);
std::vector<ApObservation> aps_from_json(const nlohmann::json& aps);

Timestamp require_timestamp(const nlohmann::json& obj, const char* key);
std::string require_string(const nlohmann::json& obj, const char* key);

}  // namespace spotex::detail
