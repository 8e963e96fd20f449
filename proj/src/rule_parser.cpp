#include <algorithm>
#include <charconv>
#include <cstdio>

#include "spotex/mac_address.hpp"
#include "spotex/rules.hpp"

namespace spotex {

std::string_view predicate_name(PredicateKind kind) noexcept {
  switch (kind) {
    case PredicateKind::is_visible:
      return "IS_VISIBLE";
    case PredicateKind::is_visible_mac:
      return "IS_VISIBLE_MAC";
    case PredicateKind::rssi_in:
      return "RSSI_IN";
    case PredicateKind::time_between:
      return "TIME_BETWEEN";
    case PredicateKind::client_is:
      return "CLIENT_IS";
    case PredicateKind::first_visit:
      return "FIRST_VISIT";
    case PredicateKind::in_group_of:
      return "IN_GROUP_OF";
    case PredicateKind::attr_ge:
      return "ATTR_GE";
  }
  return "?";
}

std::optional<PredicateKind> predicate_from_name(std::string_view name) noexcept {
  for (auto kind : kAllPredicates) {
    if (predicate_name(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

enum class ArgType { string, integer };

std::vector<ArgType> signature(PredicateKind kind) {
  using enum ArgType;
  switch (kind) {
    case PredicateKind::is_visible:
    case PredicateKind::is_visible_mac:
    case PredicateKind::client_is:
      return {string};
    case PredicateKind::rssi_in:
      return {string, integer, integer};
    case PredicateKind::time_between:
      return {string, string};
    case PredicateKind::first_visit:
      return {};
    case PredicateKind::in_group_of:
      return {integer, integer};
    case PredicateKind::attr_ge:
      return {string, integer};
  }
  return {};
}

bool is_clock_text(const std::string& s) {
  if (s.size() != 5 || s[2] != ':') return false;
  for (std::size_t i : {0, 1, 3, 4}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const int hh = (s[0] - '0') * 10 + (s[1] - '0');
  const int mm = (s[3] - '0') * 10 + (s[4] - '0');
  return hh < 24 && mm < 60;
}

}  // namespace

void validate_predicate(const Predicate& pred) {
  const auto name = std::string(predicate_name(pred.kind));
  const auto sig = signature(pred.kind);
  if (pred.args.size() != sig.size()) {
    throw Error(ErrorCode::wrong_arity, name + " expects " + std::to_string(sig.size()) + " argument(s), got " +
                                            std::to_string(pred.args.size()));
  }
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const bool is_string = std::holds_alternative<std::string>(pred.args[i]);
    if (is_string != (sig[i] == ArgType::string)) {
      throw Error(ErrorCode::invalid_argument, "argument " + std::to_string(i + 1) + " of " + name + " must be " +
                                                   (sig[i] == ArgType::string ? "a string" : "an integer"));
    }
  }
  const auto str = [&](std::size_t i) -> const std::string& { return std::get<std::string>(pred.args[i]); };
  const auto num = [&](std::size_t i) { return std::get<std::int64_t>(pred.args[i]); };

  switch (pred.kind) {
    case PredicateKind::is_visible_mac:
    case PredicateKind::client_is:
      if (!MacAddress::is_valid(str(0))) {
        throw Error(ErrorCode::invalid_argument, name + ": invalid mac address '" + str(0) + "'");
      }
      break;
    case PredicateKind::rssi_in:
      if (num(1) > num(2)) {
        throw Error(ErrorCode::invalid_interval, name + ": lower bound " + std::to_string(num(1)) +
                                                     " exceeds upper bound " + std::to_string(num(2)));
      }
      break;
    case PredicateKind::time_between:
      for (std::size_t i = 0; i < 2; ++i) {
        if (!is_clock_text(str(i))) {
          throw Error(ErrorCode::invalid_argument, name + ": expected HH:MM, got '" + str(i) + "'");
        }
      }
      break;
    case PredicateKind::in_group_of:
      if (num(0) < 1) throw Error(ErrorCode::invalid_argument, name + ": group size must be >= 1");
      if (num(1) < 1) throw Error(ErrorCode::invalid_argument, name + ": duration must be >= 1 s");
      break;
    case PredicateKind::attr_ge:
      if (str(0).empty()) throw Error(ErrorCode::invalid_argument, name + ": attribute key must not be empty");
      break;
    case PredicateKind::is_visible:
    case PredicateKind::first_visit:
      break;
  }
}

Condition Condition::leaf(Predicate pred) {
  Condition c;
  c.op_ = Op::predicate;
  c.pred_ = std::move(pred);
  return c;
}

Condition Condition::conjunction(Condition lhs, Condition rhs) {
  Condition c;
  c.op_ = Op::conjunction;
  c.operands_.push_back(std::move(lhs));
  c.operands_.push_back(std::move(rhs));
  return c;
}

Condition Condition::disjunction(Condition lhs, Condition rhs) {
  Condition c;
  c.op_ = Op::disjunction;
  c.operands_.push_back(std::move(lhs));
  c.operands_.push_back(std::move(rhs));
  return c;
}

Condition Condition::negation(Condition operand) {
  Condition c;
  c.op_ = Op::negation;
  c.operands_.push_back(std::move(operand));
  return c;
}

bool Condition::uses(PredicateKind kind) const {
  if (op_ == Op::predicate) return pred_.kind == kind;
  return std::any_of(operands_.begin(), operands_.end(), [kind](const Condition& c) { return c.uses(kind); });
}

ParseError::ParseError(ErrorCode code, std::size_t line, std::size_t column, std::vector<std::string> expected,
                       const std::string& detail)
    : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + detail),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

constexpr std::size_t kMaxNesting = 256;

bool is_word_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_word_char(char c) { return is_word_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           const auto lower = [](char ch) { return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch; };
           return lower(x) == lower(y);
         });
}

bool is_keyword(std::string_view word) {
  return iequals(word, "IF") || iequals(word, "THEN") || iequals(word, "AND") || iequals(word, "OR") ||
         iequals(word, "NOT");
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

class Parser {
 public:
  explicit Parser(std::string_view source) : src_(source) {}

  std::vector<Rule> parse_all() {
    std::vector<Rule> rules;
    for (;;) {
      skip_trivia();
      if (at_end()) break;
      const std::size_t if_at = pos_;
      if (!peek_keyword("IF")) fail(ErrorCode::syntax_error, pos_, {"IF", "end of input"}, "expected a rule");
      pos_ += 2;

      auto condition = parse_expr(0);

      skip_trivia();
      if (!peek_keyword("THEN")) fail(ErrorCode::syntax_error, pos_, {"AND", "OR", "THEN"}, "unexpected token");
      pos_ += 4;
      skip_trivia();
      if (at_end() || src_[pos_] != '{') fail(ErrorCode::syntax_error, pos_, {"'{'"}, "expected message");
      ++pos_;
      auto message = parse_message(pos_ - 1);

      Rule rule = make_rule(std::move(condition), std::move(message));
      rule.line = locate(if_at).first;
      rules.push_back(std::move(rule));
    }
    return rules;
  }

 private:
  [[noreturn]] void fail(ErrorCode code, std::size_t at, std::vector<std::string> expected, const std::string& what) {
    const auto [line, column] = locate(at);
    std::string detail = what;
    if (!expected.empty()) {
      detail += "; expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i != 0) detail += i + 1 == expected.size() ? " or " : ", ";
        detail += expected[i];
      }
      detail += ", found " + describe(at);
    }
    throw ParseError(code, line, column, std::move(expected), detail);
  }

  std::pair<std::size_t, std::size_t> locate(std::size_t offset) const {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        column = 1;
      } else if ((static_cast<unsigned char>(src_[i]) & 0xC0) != 0x80) {
        ++column;
      }
    }
    return {line, column};
  }

  std::string describe(std::size_t at) const {
    if (at >= src_.size()) return "end of input";
    if (auto word = word_at(at); !word.empty()) return "'" + std::string(word) + "'";
    const auto c = static_cast<unsigned char>(src_[at]);
    if (c >= 0x20 && c < 0x7f) return std::string("'") + static_cast<char>(c) + "'";
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02x", c);
    return buf;
  }

  bool at_end() const { return pos_ >= src_.size(); }

  void skip_trivia() {
    while (!at_end()) {
      if (is_space(src_[pos_])) {
        ++pos_;
      } else if (src_[pos_] == '#') {
        while (!at_end() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view word_at(std::size_t at) const {
    if (at >= src_.size() || !is_word_start(src_[at])) return {};
    std::size_t end = at;
    while (end < src_.size() && is_word_char(src_[end])) ++end;
    return src_.substr(at, end - at);
  }

  bool peek_keyword(std::string_view keyword) const { return iequals(word_at(pos_), keyword); }

  Condition parse_expr(std::size_t depth) {
    auto lhs = parse_term(depth);
    for (;;) {
      skip_trivia();
      if (!peek_keyword("OR")) return lhs;
      pos_ += 2;
      lhs = Condition::disjunction(std::move(lhs), parse_term(depth));
    }
  }

  Condition parse_term(std::size_t depth) {
    auto lhs = parse_factor(depth);
    for (;;) {
      skip_trivia();
      if (!peek_keyword("AND")) return lhs;
      pos_ += 3;
      lhs = Condition::conjunction(std::move(lhs), parse_factor(depth));
    }
  }

  Condition parse_factor(std::size_t depth) {
    skip_trivia();
    if (depth > kMaxNesting) fail(ErrorCode::syntax_error, pos_, {}, "expression nested too deeply");
    if (!at_end() && src_[pos_] == '(') {
      ++pos_;
      auto inner = parse_expr(depth + 1);
      skip_trivia();
      if (at_end() || src_[pos_] != ')') fail(ErrorCode::syntax_error, pos_, {"AND", "OR", "')'"}, "unbalanced '('");
      ++pos_;
      return inner;
    }
    const auto word = word_at(pos_);
    if (iequals(word, "NOT")) {
      pos_ += 3;
      return Condition::negation(parse_factor(depth + 1));
    }
    if (word.empty() || is_keyword(word)) {
      fail(ErrorCode::syntax_error, pos_, {"NOT", "'('", "predicate"}, "expected a condition");
    }
    return Condition::leaf(parse_predicate());
  }

  Predicate parse_predicate() {
    const std::size_t name_at = pos_;
    const auto name = word_at(pos_);
    const auto kind = predicate_from_name(name);
    if (!kind) fail(ErrorCode::unknown_predicate, name_at, {}, "unknown predicate '" + std::string(name) + "'");
    pos_ += name.size();

    skip_trivia();
    if (at_end() || src_[pos_] != '(') fail(ErrorCode::syntax_error, pos_, {"'('"}, "expected argument list");
    ++pos_;

    Predicate pred{*kind, {}};
    skip_trivia();
    if (!at_end() && src_[pos_] == ')') {
      ++pos_;
    } else {
      for (;;) {
        skip_trivia();
        pred.args.push_back(parse_argument());
        skip_trivia();
        if (!at_end() && src_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (!at_end() && src_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail(ErrorCode::syntax_error, pos_, {"','", "')'"}, "malformed argument list");
      }
    }

    try {
      validate_predicate(pred);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      const auto [line, column] = locate(name_at);
      throw ParseError(e.code(), line, column, {}, e.what());
    }
    return pred;
  }

  Argument parse_argument() {
    if (at_end()) fail(ErrorCode::syntax_error, pos_, {"string", "integer"}, "expected argument");
    if (src_[pos_] == '\'') return parse_string();
    if (src_[pos_] == '-' || is_digit(src_[pos_])) return parse_integer();
    fail(ErrorCode::syntax_error, pos_, {"string", "integer"}, "expected argument");
  }

  std::string parse_string() {
    const std::size_t start = pos_++;
    std::string out;
    while (!at_end()) {
      const char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) break;
        out.push_back(src_[pos_ + 1]);
        pos_ += 2;
      } else if (c == '\'') {
        ++pos_;
        return out;
      } else {
        out.push_back(c);
        ++pos_;
      }
    }
    fail(ErrorCode::syntax_error, start, {"closing quote"}, "unterminated string");
  }

  std::int64_t parse_integer() {
    const std::size_t start = pos_;
    if (src_[pos_] == '-') ++pos_;
    if (at_end() || !is_digit(src_[pos_])) fail(ErrorCode::syntax_error, pos_, {"digit"}, "malformed integer");
    while (!at_end() && is_digit(src_[pos_])) ++pos_;
    std::int64_t value = 0;
    const auto* first = src_.data() + start;
    const auto* last = src_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) fail(ErrorCode::invalid_argument, start, {}, "integer out of range");
    return value;
  }

  std::string parse_message(std::size_t open_at) {
    std::string text;
    std::size_t depth = 0;
    while (!at_end()) {
      const char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size() &&
          (src_[pos_ + 1] == '{' || src_[pos_ + 1] == '}' || src_[pos_ + 1] == '\\')) {
        text.push_back(src_[pos_ + 1]);
        pos_ += 2;
        continue;
      }
      ++pos_;
      if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (depth == 0) return trim(text);
        --depth;
      }
      text.push_back(c);
    }
    fail(ErrorCode::syntax_error, open_at, {"'}'"}, "unterminated message");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Rule> parse_rules(std::string_view source) { return Parser(source).parse_all(); }

}  // namespace spotex
