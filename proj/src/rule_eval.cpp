#include <algorithm>

#include "spotex/engine.hpp"
#include "spotex/error.hpp"
#include "spotex/groups.hpp"

namespace spotex {

TimeOfDay TimeOfDay::from_seconds(int seconds) {
  if (seconds < 0 || seconds >= 86400) throw Error(ErrorCode::invalid_argument, "time of day out of range");
  TimeOfDay t;
  t.seconds_ = seconds;
  return t;
}

TimeOfDay TimeOfDay::from_hhmm(std::string_view text) {
  const auto digit = [&](std::size_t i) {
    if (i >= text.size() || text[i] < '0' || text[i] > '9') {
      throw Error(ErrorCode::invalid_argument, "expected HH:MM, got '" + std::string(text) + "'");
    }
    return text[i] - '0';
  };
  if (text.size() != 5 || text[2] != ':') {
    throw Error(ErrorCode::invalid_argument, "expected HH:MM, got '" + std::string(text) + "'");
  }
  const int hh = digit(0) * 10 + digit(1);
  const int mm = digit(3) * 10 + digit(4);
  if (hh > 23 || mm > 59) throw Error(ErrorCode::invalid_argument, "expected HH:MM, got '" + std::string(text) + "'");
  return from_seconds(hh * 3600 + mm * 60);
}

TimeOfDay TimeOfDay::from_timestamp(Timestamp t_ms, int utc_offset_minutes) {
  constexpr std::int64_t day = 86400;
  const std::int64_t secs = t_ms / 1000 - (t_ms % 1000 < 0 ? 1 : 0) + std::int64_t{utc_offset_minutes} * 60;
  return from_seconds(static_cast<int>(((secs % day) + day) % day));
}

bool VisitHistory::visited(const MacAddress& client, const std::string& rule_id) const {
  return seen_.contains({client, rule_id});
}

void VisitHistory::record(const MacAddress& client, const std::string& rule_id) { seen_.emplace(client, rule_id); }

namespace {

const std::string& str_arg(const Predicate& p, std::size_t i) { return std::get<std::string>(p.args[i]); }
std::int64_t int_arg(const Predicate& p, std::size_t i) { return std::get<std::int64_t>(p.args[i]); }

bool any_observation(const Fingerprint& scan, auto&& pred) {
  const auto& obs = scan.observations();
  return std::any_of(obs.begin(), obs.end(), [&](const auto& entry) { return pred(entry.second); });
}

bool in_time_window(TimeOfDay now, TimeOfDay from, TimeOfDay to) {
  if (from < to) return from <= now && now < to;
  if (to < from) return now >= from || now < to;  // wraps past midnight
  return false;
}

bool eval_predicate(const Predicate& p, const EvalContext& ctx, bool first_visit) {
  switch (p.kind) {
    case PredicateKind::is_visible:
      return any_observation(ctx.scan, [&](const ApObservation& o) { return o.ssid() == str_arg(p, 0); });
    case PredicateKind::is_visible_mac:
      return ctx.scan.find(MacAddress::parse(str_arg(p, 0))) != nullptr;
    case PredicateKind::rssi_in: {
      const auto lo = int_arg(p, 1);
      const auto hi = int_arg(p, 2);
      return any_observation(ctx.scan, [&](const ApObservation& o) {
        return o.ssid() == str_arg(p, 0) && lo <= o.rssi() && o.rssi() <= hi;
      });
    }
    case PredicateKind::time_between:
      return in_time_window(ctx.now, TimeOfDay::from_hhmm(str_arg(p, 0)), TimeOfDay::from_hhmm(str_arg(p, 1)));
    case PredicateKind::client_is:
      return ctx.client == MacAddress::parse(str_arg(p, 0));
    case PredicateKind::first_visit:
      return first_visit;
    case PredicateKind::in_group_of:
      if (ctx.log == nullptr) throw Error(ErrorCode::proximity_log_required, "proximity log required");
      return in_group_of(*ctx.log, ctx.client, int_arg(p, 0), int_arg(p, 1), ctx.scan.t(), ctx.group.delta_ms,
                         ctx.group.omega_db);
    case PredicateKind::attr_ge: {
      auto it = ctx.attrs.find(str_arg(p, 0));
      return it != ctx.attrs.end() && it->second >= int_arg(p, 1);
    }
  }
  return false;
}

}  // namespace

bool evaluate_condition(const Condition& c, const EvalContext& ctx, bool first_visit) {
  switch (c.op()) {
    case Condition::Op::predicate:
      return eval_predicate(c.predicate(), ctx, first_visit);
    case Condition::Op::negation:
      return !evaluate_condition(c.operand(), ctx, first_visit);
    case Condition::Op::conjunction:
      return evaluate_condition(c.lhs(), ctx, first_visit) && evaluate_condition(c.rhs(), ctx, first_visit);
    case Condition::Op::disjunction:
      return evaluate_condition(c.lhs(), ctx, first_visit) || evaluate_condition(c.rhs(), ctx, first_visit);
  }
  return false;
}

bool evaluate(const Rule& rule, const EvalContext& ctx) {
  if (ctx.log == nullptr && rule.condition.uses(PredicateKind::in_group_of)) {
    throw Error(ErrorCode::proximity_log_required, "proximity log required");
  }
  const bool first = ctx.history == nullptr || !ctx.history->visited(ctx.client, rule.id);
  return evaluate_condition(rule.condition, ctx, first);
}

namespace {

bool visit_qualifies(const Rule& rule, const EvalContext& ctx) {
  return ctx.history != nullptr && rule.condition.uses(PredicateKind::first_visit) &&
         !ctx.history->visited(ctx.client, rule.id) && evaluate_condition(rule.condition, ctx, true);
}

}  // namespace

bool commit_visit(const Rule& rule, const EvalContext& ctx) {
  if (!visit_qualifies(rule, ctx)) return false;
  ctx.history->record(ctx.client, rule.id);
  return true;
}

std::vector<Firing> match_all(std::span<const Rule> rules, const EvalContext& ctx) {
  std::vector<Firing> fired;
  std::vector<const Rule*> visits;
  for (const auto& rule : rules) {
    try {
      if (evaluate(rule, ctx)) fired.push_back({rule.id, rule.message});
      if (visit_qualifies(rule, ctx)) visits.push_back(&rule);
    } catch (const Error& e) {
      throw Error(e.code(), "rule " + rule.id + ": " + e.what());
    }
  }
  for (const auto* rule : visits) ctx.history->record(ctx.client, rule->id);
  return fired;
}

}  // namespace spotex
