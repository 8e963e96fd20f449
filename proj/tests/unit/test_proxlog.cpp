#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "spotex/error.hpp"
#include "spotex/proxlog.hpp"
#include "test_support.hpp"

using namespace spotex;
using spotex::testing::fp;
using spotex::testing::mac;

namespace {

constexpr Timestamp kMin = std::numeric_limits<Timestamp>::min();
constexpr Timestamp kMax = std::numeric_limits<Timestamp>::max();

std::vector<LogRecord> linear_window(const LogStore& s, Timestamp lo, Timestamp hi, std::optional<MacAddress> skip) {
  std::vector<LogRecord> out;
  for (const auto& r : s.records()) {
    if (r.t() >= lo && r.t() <= hi && (!skip || r.client != *skip)) out.push_back(r);
  }
  return out;
}

std::optional<LogRecord> linear_previous(const LogStore& s, const MacAddress& c, Timestamp before) {
  std::optional<LogRecord> best;
  for (const auto& r : s.records()) {
    if (r.client == c && r.t() < before && (!best || r.t() >= best->t())) best = r;
  }
  return best;
}

}  // namespace

TEST_CASE("append") {
  LogStore s;
  s.append({mac(1), fp(10, {{1, -50}})});
  CHECK(s.size() == 1);

  SUBCASE("equal timestamps are kept") {
    s.append({mac(1), fp(10, {{1, -60}})});
    CHECK(s.size() == 2);
  }
  SUBCASE("regression for one client is rejected") {
    try {
      s.append({mac(1), fp(9, {})});
      FAIL("expected out-of-order error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::out_of_order_record);
    }
    CHECK(s.size() == 1);
  }
  SUBCASE("other clients may be globally out of order") {
    s.append({mac(2), fp(5, {})});
    s.append({mac(2), fp(7, {})});
    s.append({mac(1), fp(11, {})});
    REQUIRE(s.size() == 4);
    std::vector<Timestamp> times;
    for (const auto& r : s.records()) times.push_back(r.t());
    CHECK(times == std::vector<Timestamp>{5, 7, 10, 11});
    CHECK(s.client_records(mac(2)).size() == 2);
  }
}

TEST_CASE("query_window") {
  LogStore s;
  s.append({mac(1), fp(0, {})});
  s.append({mac(2), fp(5, {})});
  s.append({mac(1), fp(10, {})});
  CHECK(s.query_window(20, 30).empty());
  CHECK(s.query_window(kMin, kMax).size() == 3);
  CHECK(s.query_window(kMin, kMax, mac(1)).size() == 1);
  CHECK(s.query_window(5, 10).size() == 2);  // inclusive ends
  CHECK_THROWS_AS((void)s.query_window(10, 5), Error);
}

TEST_CASE("previous_measurement") {
  LogStore s;
  CHECK_FALSE(s.previous_measurement(mac(1), 10).has_value());
  s.append({mac(1), fp(5, {{1, -40}})});
  REQUIRE(s.previous_measurement(mac(1), 10).has_value());
  CHECK(s.previous_measurement(mac(1), 10)->t() == 5);
  CHECK_FALSE(s.previous_measurement(mac(1), 5).has_value());
  CHECK_FALSE(s.previous_measurement(mac(2), 10).has_value());
}

TEST_CASE("window and predecessor queries match linear scans") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<Timestamp> when(-1000, 61'000);
  for (int trial = 0; trial < 100; ++trial) {
    const auto store = spotex::testing::random_store(rng, 4, 20, 5);
    std::size_t seen = 0;
    for (const auto& c : store.clients()) seen += store.client_records(c).size();
    CHECK(seen == store.size());
    CHECK(store.query_window(kMin, kMax) == store.records());
    CHECK(std::is_sorted(store.records().begin(), store.records().end(),
                         [](const LogRecord& l, const LogRecord& r) { return l.t() < r.t(); }));
    for (int q = 0; q < 10; ++q) {
      Timestamp lo = when(rng);
      Timestamp hi = when(rng);
      if (lo > hi) std::swap(lo, hi);
      const auto who = mac(static_cast<std::uint8_t>(101 + q % 5));
      CHECK(store.query_window(lo, hi) == linear_window(store, lo, hi, std::nullopt));
      CHECK(store.query_window(lo, hi, who) == linear_window(store, lo, hi, who));
      CHECK(store.previous_measurement(who, hi) == linear_previous(store, who, hi));
    }
  }
}

TEST_CASE("jsonl codec") {
  const LogRecord rec{mac(7), Fingerprint(1700000000123, {ApObservation("caf\xc3\xa9 \"x\"", mac(1), -42),
                                                          ApObservation("", mac(2), -100)})};
  const auto line = to_jsonl_line(rec);
  CHECK(line ==
        "{\"t\":1700000000123,\"client\":\"02:00:00:00:00:07\",\"aps\":[{\"ssid\":\"caf\xc3\xa9 \\\"x\\\"\","
        "\"mac\":\"02:00:00:00:00:01\",\"rssi\":-42},{\"ssid\":\"\",\"mac\":\"02:00:00:00:00:02\",\"rssi\":-100}]}");
  CHECK(parse_log_line(line) == rec);

  SUBCASE("round trip preserves query results") {
    std::mt19937_64 rng(55);
    const auto store = spotex::testing::random_store(rng, 5, 30, 6);
    std::stringstream buf;
    save_jsonl(store, buf);
    const auto loaded = load_jsonl(buf);
    CHECK(loaded.records() == store.records());
    for (const auto& c : store.clients()) {
      CHECK(loaded.previous_measurement(c, 30'000) == store.previous_measurement(c, 30'000));
      CHECK(loaded.query_window(10'000, 20'000, c) == store.query_window(10'000, 20'000, c));
    }
  }
  SUBCASE("comments and blank lines are skipped") {
    std::stringstream in("# header\n\n" + line + "\n");
    CHECK(load_jsonl(in).size() == 1);
  }
}

TEST_CASE("load errors name the line") {
  const auto failure = [](const std::string& text) {
    std::stringstream in(text);
    try {
      load_jsonl(in);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string ok1 = R"({"t": 10, "client": "02:00:00:00:00:01", "aps": []})";
  const std::string ok0 = R"({"t": 5, "client": "02:00:00:00:00:01", "aps": []})";
  CHECK(failure(ok1 + "\n# c\n" + ok0 + "\n").starts_with("line 3: out-of-order"));
  CHECK(failure("{not json}\n").starts_with("line 1: invalid JSON"));
  CHECK(failure(R"({"t": 1.5, "client": "02:00:00:00:00:01", "aps": []})").starts_with("line 1"));
  CHECK(failure(R"({"t": 1, "client": "zz", "aps": []})").starts_with("line 1: invalid mac"));
  CHECK(failure(R"({"t": 1, "client": "02:00:00:00:00:01", "aps": [{"ssid":"a","mac":"02:00:00:00:00:02","rssi":5}]})")
            .starts_with("line 1: rssi"));
  CHECK(failure(R"({"t": 1, "client": "02:00:00:00:00:01"})").starts_with("line 1: missing"));
  CHECK(failure(ok0 + "\n" + R"({"t": 1, "client": "02:00:00:00:00:01", "aps": [{"ssid":"a","mac":"02:00:00:00:00:02","rssi":-5},{"ssid":"b","mac":"02:00:00:00:00:02","rssi":-6}]})")
            .starts_with("line 2: duplicate mac"));
}
