#include <random>
#include <string>

#include "doctest.h"
#include "rule_gen.hpp"
#include "spotex/rules.hpp"

using namespace spotex;

namespace {

Condition pred(PredicateKind kind, std::vector<Argument> args = {}) {
  return Condition::leaf(Predicate{kind, std::move(args)});
}

ParseError parse_failure(std::string_view source) {
  try {
    parse_rules(source);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a ParseError for: " << source);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("the coupon rule parses") {
  const auto rules = parse_rules("IF IS_VISIBLE('mycafe') AND FIRST_VISIT() THEN { present the coupon info }");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].condition ==
        Condition::conjunction(pred(PredicateKind::is_visible, {"mycafe"}), pred(PredicateKind::first_visit)));
  CHECK(rules[0].message == "present the coupon info");
  CHECK(rules[0].line == 1);
  CHECK(rules[0].id.size() == 17);
}

TEST_CASE("empty and comment-only sources yield no rules") {
  CHECK(parse_rules("").empty());
  CHECK(parse_rules("   \n\t\n").empty());
  CHECK(parse_rules("# nothing here\n# still nothing").empty());
}

TEST_CASE("AND binds tighter than OR") {
  const auto rules =
      parse_rules("IF IS_VISIBLE('a') OR IS_VISIBLE('b') AND CLIENT_IS('aa:bb:cc:dd:ee:ff') THEN {x}");
  REQUIRE(rules.size() == 1);
  const auto expected = Condition::disjunction(
      pred(PredicateKind::is_visible, {"a"}),
      Condition::conjunction(pred(PredicateKind::is_visible, {"b"}),
                             pred(PredicateKind::client_is, {"aa:bb:cc:dd:ee:ff"})));
  CHECK(rules[0].condition == expected);
  CHECK(rules[0].message == "x");
}

TEST_CASE("NOT binds tightest and parentheses override precedence") {
  const auto rules = parse_rules("IF NOT IS_VISIBLE('a') AND (IS_VISIBLE('b') OR FIRST_VISIT()) THEN {y}");
  const auto expected = Condition::conjunction(
      Condition::negation(pred(PredicateKind::is_visible, {"a"})),
      Condition::disjunction(pred(PredicateKind::is_visible, {"b"}), pred(PredicateKind::first_visit)));
  CHECK(rules[0].condition == expected);
}

TEST_CASE("binary operators associate to the left") {
  const auto rules = parse_rules("IF FIRST_VISIT() AND IS_VISIBLE('a') AND IS_VISIBLE('b') THEN {}");
  const auto expected = Condition::conjunction(
      Condition::conjunction(pred(PredicateKind::first_visit), pred(PredicateKind::is_visible, {"a"})),
      pred(PredicateKind::is_visible, {"b"}));
  CHECK(rules[0].condition == expected);
  CHECK(rules[0].message.empty());
}

TEST_CASE("keywords are case-insensitive, predicate names are not") {
  const auto rules = parse_rules("if IS_VISIBLE('a') and not FIRST_VISIT() Then {ok}");
  REQUIRE(rules.size() == 1);
  const auto err = parse_failure("IF is_visible('a') THEN {x}");
  CHECK(err.code() == ErrorCode::unknown_predicate);
  CHECK(std::string(err.what()).find("is_visible") != std::string::npos);
}

TEST_CASE("multiple rules, comments and line numbers") {
  const auto rules = parse_rules(
      "# header\n"
      "IF IS_VISIBLE('a') THEN { first # not a comment }\n"
      "\n"
      "IF RSSI_IN('a', -60, -40) # trailing comment\n"
      "   THEN {\n  second\n}\n");
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].message == "first # not a comment");
  CHECK(rules[0].line == 2);
  CHECK(rules[1].message == "second");
  CHECK(rules[1].line == 4);
  CHECK(rules[1].condition == pred(PredicateKind::rssi_in, {"a", std::int64_t{-60}, std::int64_t{-40}}));
}

TEST_CASE("strings and messages handle escapes") {
  const auto rules = parse_rules(R"(IF IS_VISIBLE('it\'s \\ here') THEN { a \} b {nested} c \\ })");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].condition == pred(PredicateKind::is_visible, {"it's \\ here"}));
  CHECK(rules[0].message == "a } b {nested} c \\");
}

TEST_CASE("identical source gives identical ids; different rules differ") {
  const auto a = parse_rules("IF IS_VISIBLE('a') THEN {x}");
  const auto b = parse_rules("  IF   IS_VISIBLE( 'a' )\nTHEN {  x }");
  const auto c = parse_rules("IF IS_VISIBLE('a') THEN {y}");
  CHECK(a[0].id == b[0].id);
  CHECK(a[0].id != c[0].id);
}

TEST_CASE("syntax errors carry position and expected tokens") {
  SUBCASE("missing THEN") {
    const auto e = parse_failure("IF IS_VISIBLE('a') {x}");
    CHECK(e.code() == ErrorCode::syntax_error);
    CHECK(e.line() == 1);
    CHECK(e.column() == 20);
    CHECK(e.expected() == std::vector<std::string>{"AND", "OR", "THEN"});
  }
  SUBCASE("garbage at top level") {
    const auto e = parse_failure("\n\n  THEN");
    CHECK(e.line() == 3);
    CHECK(e.column() == 3);
    CHECK(e.expected() == std::vector<std::string>{"IF", "end of input"});
  }
  SUBCASE("unterminated message") {
    const auto e = parse_failure("IF FIRST_VISIT() THEN { never closed");
    CHECK(e.code() == ErrorCode::syntax_error);
    CHECK(e.column() == 23);
  }
  SUBCASE("unterminated string") { CHECK(parse_failure("IF IS_VISIBLE('abc").code() == ErrorCode::syntax_error); }
  SUBCASE("unbalanced paren") {
    CHECK(parse_failure("IF (IS_VISIBLE('a') THEN {x}").expected() ==
          std::vector<std::string>{"AND", "OR", "')'"});
  }
  SUBCASE("dangling operator") {
    CHECK(parse_failure("IF IS_VISIBLE('a') AND THEN {x}").expected() ==
          std::vector<std::string>{"NOT", "'('", "predicate"});
  }
  SUBCASE("columns count code points") {
    const auto e = parse_failure("IF IS_VISIBLE('\xc3\xa9') ?");
    CHECK(e.column() == 20);
  }
  SUBCASE("deep nesting is rejected, not a crash") {
    std::string deep = "IF ";
    for (int i = 0; i < 5000; ++i) deep += "(";
    CHECK(parse_failure(deep).code() == ErrorCode::syntax_error);
    std::string nots = "IF ";
    for (int i = 0; i < 5000; ++i) nots += "NOT ";
    CHECK(parse_failure(nots).code() == ErrorCode::syntax_error);
  }
}

TEST_CASE("predicate validation errors are named") {
  CHECK(parse_failure("IF IS_VISIBLE('a', 'b') THEN {x}").code() == ErrorCode::wrong_arity);
  CHECK(parse_failure("IF FIRST_VISIT(1) THEN {x}").code() == ErrorCode::wrong_arity);
  CHECK(parse_failure("IF RSSI_IN('a', -40, -60) THEN {x}").code() == ErrorCode::invalid_interval);
  CHECK(parse_failure("IF RSSI_IN('a', '-40', -60) THEN {x}").code() == ErrorCode::invalid_argument);
  CHECK(parse_failure("IF CLIENT_IS('not-a-mac') THEN {x}").code() == ErrorCode::invalid_argument);
  CHECK(parse_failure("IF TIME_BETWEEN('25:00', '10:00') THEN {x}").code() == ErrorCode::invalid_argument);
  CHECK(parse_failure("IF IN_GROUP_OF(0, 10) THEN {x}").code() == ErrorCode::invalid_argument);
  CHECK(parse_failure("IF IN_GROUP_OF(2, 0) THEN {x}").code() == ErrorCode::invalid_argument);
  CHECK(parse_failure("IF ATTR_GE(3, 3) THEN {x}").code() == ErrorCode::invalid_argument);
  CHECK(parse_failure("IF IN_GROUP_OF(99999999999999999999, 1) THEN {x}").code() == ErrorCode::invalid_argument);
  const auto e = parse_failure("IF FIRST_VISIT() AND\n  IS_VISIBLE() THEN {x}");
  CHECK(e.line() == 2);
  CHECK(e.column() == 3);
  CHECK(std::string(e.what()).find("IS_VISIBLE") != std::string::npos);
}

TEST_CASE("render") {
  SUBCASE("coupon rule round-trips") {
    const auto r = parse_rules("IF IS_VISIBLE('mycafe') AND FIRST_VISIT() THEN { present the coupon info }")[0];
    CHECK(render_rule(r) == "IF IS_VISIBLE('mycafe') AND FIRST_VISIT() THEN { present the coupon info }");
    const auto again = parse_rules(render_rule(r));
    REQUIRE(again.size() == 1);
    CHECK(again[0].condition == r.condition);
    CHECK(again[0].message == r.message);
    CHECK(again[0].id == r.id);
  }
  SUBCASE("negation is explicit") {
    const auto r = make_rule(Condition::negation(pred(PredicateKind::first_visit)), "m");
    CHECK(render_rule(r) == "IF NOT FIRST_VISIT() THEN { m }");
  }
  SUBCASE("parentheses only where needed") {
    const auto a = pred(PredicateKind::is_visible, {"a"});
    const auto b = pred(PredicateKind::is_visible, {"b"});
    const auto c = pred(PredicateKind::is_visible, {"c"});
    CHECK(render_condition(Condition::conjunction(Condition::disjunction(a, b), c)) ==
          "(IS_VISIBLE('a') OR IS_VISIBLE('b')) AND IS_VISIBLE('c')");
    CHECK(render_condition(Condition::disjunction(a, Condition::disjunction(b, c))) ==
          "IS_VISIBLE('a') OR (IS_VISIBLE('b') OR IS_VISIBLE('c'))");
    CHECK(render_condition(Condition::negation(Condition::conjunction(a, b))) ==
          "NOT (IS_VISIBLE('a') AND IS_VISIBLE('b'))");
  }
  SUBCASE("random ASTs round-trip") {
    std::mt19937_64 rng(77);
    spotex::testing::RuleGen gen{rng};
    for (int i = 0; i < 300; ++i) {
      const auto rule = make_rule(gen.condition(4), gen.message());
      const auto text = render_rule(rule);
      CAPTURE(text);
      const auto back = parse_rules(text);
      REQUIRE(back.size() == 1);
      CHECK(back[0].condition == rule.condition);
      CHECK(back[0].message == rule.message);
    }
  }
}

TEST_CASE("make_rule validates predicates built in code") {
  CHECK_THROWS_AS(make_rule(pred(PredicateKind::is_visible), "m"), Error);
  CHECK_THROWS_AS(make_rule(pred(PredicateKind::rssi_in, {"a", std::int64_t{0}, std::int64_t{-1}}), "m"), Error);
}

TEST_CASE("fuzzed input never crashes") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> len(0, 64);
  const std::string fragments[] = {"IF ", "THEN ", "AND ", "OR ", "NOT ", "(", ")", "{", "}", "'", "\\",
                                   "IS_VISIBLE", "RSSI_IN", "FIRST_VISIT()", ",", "-", "7", "#", "\n"};
  std::uniform_int_distribution<std::size_t> frag(0, std::size(fragments) - 1);
  for (int i = 0; i < 5000; ++i) {
    std::string input;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      if (k % 2 == 0) {
        input += fragments[frag(rng)];
      } else {
        input.push_back(static_cast<char>(byte(rng)));
      }
    }
    try {
      parse_rules(input);
    } catch (const ParseError& e) {
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
  }
}
