#include "spotex/groups.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "spotex/error.hpp"

namespace spotex {

void GroupParams::validate() const {
  if (delta_ms <= 0) throw Error(ErrorCode::invalid_group_params, "delta must be positive");
  if (!(omega_db > 0.0)) throw Error(ErrorCode::invalid_group_params, "omega must be positive");
  if (t_max_ms < delta_ms) throw Error(ErrorCode::invalid_group_params, "t_max must be >= delta");
}

namespace {

void require_anchor(bool found, const MacAddress& client, Timestamp t0) {
  if (!found) {
    throw Error(ErrorCode::no_anchor_measurement,
                "no anchor measurement for " + client.to_string() + " at or before t=" + std::to_string(t0));
  }
}

}  // namespace

std::set<MacAddress> detect_group(const LogStore& store, const MacAddress& client, const Fingerprint& start_env,
                                  const GroupParams& params) {
  params.validate();
  require_anchor(store.latest_at_or_before(client, params.t0).has_value(), client, params.t0);

  // Seed with the latest record per other client in [t0 - delta, t0].
  std::map<MacAddress, GroupCandidate> candidates;
  for (auto& rec : store.query_window(params.t0 - params.delta_ms, params.t0, client)) {
    candidates[rec.client] = GroupCandidate{rec.client, rec.t(), std::move(rec.fingerprint), true};
  }
  if (candidates.empty()) return {};

  std::erase_if(candidates, [&](const auto& entry) {
    return !comparable(entry.second.latest_env, start_env, params.omega_db);
  });
  if (candidates.empty()) return {};

  Timestamp t = params.t0;
  while (t > params.t0 - params.t_max_ms) {
    auto previous = store.previous_measurement(client, t);
    if (!previous) break;
    t = previous->t();
    const Fingerprint& env = previous->fingerprint;

    for (auto& [mac, candidate] : candidates) {
      const auto fresh = store.client_window(mac, t - params.delta_ms, std::min(t + params.delta_ms, params.t0));
      candidate.updated = !fresh.empty();
      if (candidate.updated) {
        candidate.latest_t = fresh.back().t();
        candidate.latest_env = fresh.back().fingerprint;
      }
    }
    std::erase_if(candidates, [](const auto& entry) { return !entry.second.updated; });
    std::erase_if(candidates, [&](const auto& entry) {
      return !comparable(entry.second.latest_env, env, params.omega_db);
    });
    if (candidates.empty()) break;
  }

  std::set<MacAddress> group;
  for (const auto& entry : candidates) group.insert(entry.first);
  return group;
}

std::set<MacAddress> brute_force_group(const LogStore& store, const MacAddress& client,
                                       const Fingerprint& start_env, const GroupParams& params) {
  params.validate();
  const auto& all = store.records();

  // Latest record of `who` in [lo, hi]; among equal timestamps the later one in store order.
  const auto latest_in = [&](const MacAddress& who, Timestamp lo, Timestamp hi) -> const LogRecord* {
    const LogRecord* best = nullptr;
    for (const auto& rec : all) {
      if (rec.client != who || rec.t() < lo || rec.t() > hi) continue;
      if (best == nullptr || rec.t() >= best->t()) best = &rec;
    }
    return best;
  };

  require_anchor(latest_in(client, std::numeric_limits<Timestamp>::min(), params.t0) != nullptr, client, params.t0);

  std::vector<const LogRecord*> anchors;
  for (Timestamp t = params.t0; t > params.t0 - params.t_max_ms;) {
    const LogRecord* prev = latest_in(client, std::numeric_limits<Timestamp>::min(), t - 1);
    if (prev == nullptr) break;
    anchors.push_back(prev);
    t = prev->t();
  }

  std::set<MacAddress> others;
  for (const auto& rec : all) {
    if (rec.client != client) others.insert(rec.client);
  }

  std::set<MacAddress> group;
  for (const auto& other : others) {
    const LogRecord* seed = latest_in(other, params.t0 - params.delta_ms, params.t0);
    if (seed == nullptr || !comparable(seed->fingerprint, start_env, params.omega_db)) continue;
    const bool stays = std::all_of(anchors.begin(), anchors.end(), [&](const LogRecord* anchor) {
      const LogRecord* rec =
          latest_in(other, anchor->t() - params.delta_ms, std::min(anchor->t() + params.delta_ms, params.t0));
      return rec != nullptr && comparable(rec->fingerprint, anchor->fingerprint, params.omega_db);
    });
    if (stays) group.insert(other);
  }
  return group;
}

bool in_group_of(const LogStore& store, const MacAddress& client, std::int64_t n, std::int64_t t_seconds,
                 Timestamp now, std::int64_t delta_ms, double omega_db) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "IN_GROUP_OF needs n >= 1");
  if (t_seconds < 1) throw Error(ErrorCode::invalid_argument, "IN_GROUP_OF needs t >= 1 s");
  const GroupParams params{delta_ms, omega_db, now, t_seconds * 1000};
  params.validate();

  const auto anchor = store.latest_at_or_before(client, now);
  if (!anchor) return false;
  if (n == 1) return true;
  const auto group = detect_group(store, client, anchor->fingerprint, params);
  return static_cast<std::int64_t>(group.size()) >= n - 1;
}

}  // namespace spotex
