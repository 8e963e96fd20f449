#include <cstdint>
#include <cstdio>

#include "spotex/rules.hpp"

namespace spotex {
namespace {

// Binding strength: OR < AND < NOT < predicate.
int precedence(Condition::Op op) {
  switch (op) {
    case Condition::Op::disjunction:
      return 1;
    case Condition::Op::conjunction:
      return 2;
    case Condition::Op::negation:
      return 3;
    case Condition::Op::predicate:
      return 4;
  }
  return 4;
}

void render_argument(const Argument& arg, std::string& out) {
  if (const auto* num = std::get_if<std::int64_t>(&arg)) {
    out += std::to_string(*num);
    return;
  }
  out.push_back('\'');
  for (char c : std::get<std::string>(arg)) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
}

void render_into(const Condition& c, int min_precedence, std::string& out) {
  const int prec = precedence(c.op());
  const bool parens = prec < min_precedence;
  if (parens) out.push_back('(');
  switch (c.op()) {
    case Condition::Op::predicate: {
      out += predicate_name(c.predicate().kind);
      out.push_back('(');
      const auto& args = c.predicate().args;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i != 0) out += ", ";
        render_argument(args[i], out);
      }
      out.push_back(')');
      break;
    }
    case Condition::Op::negation:
      out += "NOT ";
      render_into(c.operand(), prec, out);
      break;
    case Condition::Op::conjunction:
    case Condition::Op::disjunction:
      // Left-associative: the right operand needs parentheses at equal precedence.
      render_into(c.lhs(), prec, out);
      out += c.op() == Condition::Op::conjunction ? " AND " : " OR ";
      render_into(c.rhs(), prec + 1, out);
      break;
  }
  if (parens) out.push_back(')');
}

std::string escape_message(const std::string& message) {
  std::string out;
  out.reserve(message.size());
  for (char c : message) {
    if (c == '{' || c == '}' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string render_text(const Condition& condition, const std::string& message) {
  std::string out = "IF " + render_condition(condition) + " THEN {";
  if (!message.empty()) out += " " + escape_message(message);
  out += " }";
  return out;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void validate_tree(const Condition& c) {
  switch (c.op()) {
    case Condition::Op::predicate:
      validate_predicate(c.predicate());
      break;
    case Condition::Op::negation:
      validate_tree(c.operand());
      break;
    case Condition::Op::conjunction:
    case Condition::Op::disjunction:
      validate_tree(c.lhs());
      validate_tree(c.rhs());
      break;
  }
}

std::string trim(const std::string& s) {
  const auto* ws = " \t\n\r\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

std::string render_condition(const Condition& condition) {
  std::string out;
  render_into(condition, 0, out);
  return out;
}

std::string render_rule(const Rule& rule) { return render_text(rule.condition, rule.message); }

Rule make_rule(Condition condition, std::string message) {
  validate_tree(condition);
  Rule rule;
  rule.message = trim(message);
  rule.id = "r" + fnv1a_hex(render_text(condition, rule.message));
  rule.condition = std::move(condition);
  return rule;
}

}  // namespace spotex
