#include "spotex/fingerprint.hpp"

#include <cmath>
#include <cstdlib>

#include "spotex/error.hpp"

namespace spotex {

ApObservation::ApObservation(std::string ssid, MacAddress mac, int rssi)
    : ssid_(std::move(ssid)), mac_(mac), rssi_(rssi) {
  if (rssi < kMinRssi || rssi > kMaxRssi) {
    throw Error(ErrorCode::invalid_rssi,
                "rssi " + std::to_string(rssi) + " outside [-100, 0] for " + mac.to_string());
  }
}

Fingerprint::Fingerprint(Timestamp t, std::span<const ApObservation> observations) : t_(t) {
  for (const auto& obs : observations) {
    if (!observations_.emplace(obs.mac(), obs).second) {
      throw Error(ErrorCode::duplicate_mac, "duplicate mac " + obs.mac().to_string() + " in fingerprint");
    }
  }
}

Fingerprint::Fingerprint(Timestamp t, std::initializer_list<ApObservation> observations)
    : Fingerprint(t, std::span<const ApObservation>(observations.begin(), observations.size())) {}

const ApObservation* Fingerprint::find(const MacAddress& mac) const {
  auto it = observations_.find(mac);
  return it == observations_.end() ? nullptr : &it->second;
}

SignalVector::SignalVector(Entries entries) : entries_(std::move(entries)) {
  for (const auto& [mac, value] : entries_) {
    if (!std::isfinite(value) || value > 0.0) {
      throw Error(ErrorCode::invalid_rssi, "signal vector entry for " + mac.to_string() + " must be <= 0 dBm");
    }
  }
}

SignalVector SignalVector::from_fingerprint(const Fingerprint& fp) {
  Entries entries;
  for (const auto& [mac, obs] : fp.observations()) entries.emplace(mac, static_cast<double>(obs.rssi()));
  return SignalVector(std::move(entries));
}

std::vector<MacAddress> SignalVector::universe() const {
  std::vector<MacAddress> macs;
  macs.reserve(entries_.size());
  for (const auto& entry : entries_) macs.push_back(entry.first);
  return macs;
}

SignalVector average_vector(std::span<const Fingerprint> scans) {
  if (scans.empty()) throw Error(ErrorCode::no_scans, "no scans");

  struct Accumulator {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<MacAddress, Accumulator> acc;
  for (const auto& scan : scans) {
    for (const auto& [mac, obs] : scan.observations()) {
      auto& slot = acc[mac];
      slot.sum += obs.rssi();
      ++slot.count;
    }
  }

  SignalVector::Entries entries;
  for (const auto& [mac, slot] : acc) entries.emplace(mac, slot.sum / static_cast<double>(slot.count));
  return SignalVector(std::move(entries));
}

AlignedVectors align(const SignalVector& a, const SignalVector& b, double fill) {
  AlignedVectors out;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  const auto ea = a.entries().end();
  const auto eb = b.entries().end();
  // Sorted merge of the two key sets.
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      out.universe.push_back(ia->first);
      out.a.push_back(ia->second);
      out.b.push_back(fill);
      ++ia;
    } else if (ia == ea || ib->first < ia->first) {
      out.universe.push_back(ib->first);
      out.a.push_back(fill);
      out.b.push_back(ib->second);
      ++ib;
    } else {
      out.universe.push_back(ia->first);
      out.a.push_back(ia->second);
      out.b.push_back(ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

bool comparable(const Fingerprint& a, const Fingerprint& b, double omega) {
  if (!(omega > 0.0)) throw Error(ErrorCode::invalid_threshold, "invalid threshold");
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [mac, obs] : small.observations()) {
    if (const auto* other = large.find(mac)) {
      if (std::abs(obs.rssi() - other->rssi()) < omega) return true;
    }
  }
  return false;
}

bool shares_access_point(const Fingerprint& a, const Fingerprint& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& entry : small.observations()) {
    if (large.find(entry.first) != nullptr) return true;
  }
  return false;
}

}  // namespace spotex
