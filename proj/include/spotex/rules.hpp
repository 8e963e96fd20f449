#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spotex/error.hpp"

namespace spotex {

enum class PredicateKind {
  is_visible,      // IS_VISIBLE('ssid')
  is_visible_mac,  // IS_VISIBLE_MAC('aa:bb:cc:dd:ee:ff')
  rssi_in,         // RSSI_IN('ssid', lo, hi)
  time_between,    // TIME_BETWEEN('HH:MM', 'HH:MM')
  client_is,       // CLIENT_IS('aa:bb:cc:dd:ee:ff')
  first_visit,     // FIRST_VISIT()
  in_group_of,     // IN_GROUP_OF(n, seconds)
  attr_ge,         // ATTR_GE('key', value)
};

inline constexpr PredicateKind kAllPredicates[] = {
    PredicateKind::is_visible,   PredicateKind::is_visible_mac, PredicateKind::rssi_in,
    PredicateKind::time_between, PredicateKind::client_is,      PredicateKind::first_visit,
    PredicateKind::in_group_of,  PredicateKind::attr_ge,
};

std::string_view predicate_name(PredicateKind kind) noexcept;
/// Exact, case-sensitive lookup.
std::optional<PredicateKind> predicate_from_name(std::string_view name) noexcept;

using Argument = std::variant<std::string, std::int64_t>;

struct Predicate {
  PredicateKind kind = PredicateKind::first_visit;
  std::vector<Argument> args;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Checks arity, argument types and per-predicate constraints. Throws
/// Error(wrong_arity | invalid_argument | invalid_interval).
void validate_predicate(const Predicate& pred);

/// Boolean condition tree. AND and OR nodes are binary.
class Condition {
 public:
  enum class Op { predicate, conjunction, disjunction, negation };

  static Condition leaf(Predicate pred);
  static Condition conjunction(Condition lhs, Condition rhs);
  static Condition disjunction(Condition lhs, Condition rhs);
  static Condition negation(Condition operand);

  [[nodiscard]] Op op() const noexcept { return op_; }
  [[nodiscard]] const Predicate& predicate() const noexcept { return pred_; }
  [[nodiscard]] const Condition& lhs() const noexcept { return operands_[0]; }
  [[nodiscard]] const Condition& rhs() const noexcept { return operands_[1]; }
  [[nodiscard]] const Condition& operand() const noexcept { return operands_[0]; }

  [[nodiscard]] bool uses(PredicateKind kind) const;

  friend bool operator==(const Condition&, const Condition&) = default;

 private:
  Op op_ = Op::predicate;
  Predicate pred_;
  std::vector<Condition> operands_;
};

struct Rule {
  std::string id;  // stable hash of the canonical rule text
  Condition condition;
  std::string message;
  std::size_t line = 0;  // 1-based source line of IF, 0 when built in code
};

/// Builds a rule and derives its id. Validates every predicate.
Rule make_rule(Condition condition, std::string message);

/// Positioned parse failure.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, std::size_t column, std::vector<std::string> expected,
             const std::string& detail);

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }
  [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

/// Parses a rules document:
///
///   rules     := { rule } ;
///   rule      := "IF" expr "THEN" "{" message "}" ;
///   expr      := term { "OR" term } ;
///   term      := factor { "AND" factor } ;
///   factor    := "NOT" factor | "(" expr ")" | predicate ;
///   predicate := NAME "(" [ arg { "," arg } ] ")" ;
///   arg       := STRING | INTEGER ;
///
/// Keywords are case-insensitive, predicate names are not. '#' starts a line
/// comment outside strings and messages. Strings are single-quoted with
/// backslash escapes. A message runs to the matching unescaped '}' (braces
/// may nest; "\{", "\}" and "\\" are escapes) and is trimmed.
///
/// Throws ParseError on any failure.
std::vector<Rule> parse_rules(std::string_view source);

/// Canonical text; parse_rules(render_rule(r)) reproduces r's condition and message.
std::string render_rule(const Rule& rule);
std::string render_condition(const Condition& condition);

}  // namespace spotex
