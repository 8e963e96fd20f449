#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spotex/fingerprint.hpp"
#include "spotex/proxlog.hpp"
#include "spotex/rules.hpp"

namespace spotex {

/// Local wall-clock time, seconds since midnight.
class TimeOfDay {
 public:
  constexpr TimeOfDay() = default;

  static TimeOfDay from_seconds(int seconds);
  /// "HH:MM", 00:00 .. 23:59.
  static TimeOfDay from_hhmm(std::string_view text);
  /// Time of day of an epoch timestamp shifted by a fixed UTC offset.
  static TimeOfDay from_timestamp(Timestamp t_ms, int utc_offset_minutes = 0);

  [[nodiscard]] int seconds() const noexcept { return seconds_; }

  friend constexpr auto operator<=>(const TimeOfDay&, const TimeOfDay&) = default;

 private:
  int seconds_ = 0;
};

/// Which (client, rule) pairs have already had their antecedent satisfied.
/// Single writer: one match_all pass at a time per history.
class VisitHistory {
 public:
  [[nodiscard]] bool visited(const MacAddress& client, const std::string& rule_id) const;
  void record(const MacAddress& client, const std::string& rule_id);
  [[nodiscard]] std::size_t size() const noexcept { return seen_.size(); }

 private:
  std::set<std::pair<MacAddress, std::string>> seen_;
};

/// Parameters handed to the group detector by IN_GROUP_OF.
struct GroupTuning {
  std::int64_t delta_ms = 3000;
  double omega_db = 6.0;
};

struct EvalContext {
  Fingerprint scan;
  TimeOfDay now;
  MacAddress client;
  std::map<std::string, std::int64_t> attrs;
  VisitHistory* history = nullptr;  // null: FIRST_VISIT is always true and nothing is recorded
  const LogStore* log = nullptr;    // required by IN_GROUP_OF
  GroupTuning group;
};

/// Evaluates a rule's condition. Does not touch the visit history.
/// Throws Error(proximity_log_required) if the rule uses IN_GROUP_OF and ctx.log is null.
bool evaluate(const Rule& rule, const EvalContext& ctx);

/// Evaluates `condition` alone with FIRST_VISIT() bound to `first_visit`.
bool evaluate_condition(const Condition& condition, const EvalContext& ctx, bool first_visit);

/// Marks the rule as visited for ctx.client if its antecedent holds with
/// FIRST_VISIT() taken as true. Returns whether a visit was recorded.
bool commit_visit(const Rule& rule, const EvalContext& ctx);

struct Firing {
  std::string rule_id;
  std::string message;

  friend bool operator==(const Firing&, const Firing&) = default;
};

/// Fires every rule against one context, in source order. All rules see the
/// history as it was on entry; visits are committed after the pass.
/// Errors are rethrown with the offending rule id prefixed.
std::vector<Firing> match_all(std::span<const Rule> rules, const EvalContext& ctx);

}  // namespace spotex
