#include <random>

#include "doctest.h"
#include "spotex/error.hpp"
#include "spotex/simulator.hpp"
#include "test_support.hpp"

using namespace spotex;

namespace {

Scenario stationary(double sigma, std::uint64_t seed = 7) {
  Scenario s;
  s.seed = seed;
  s.noise_sigma_db = sigma;
  s.venue.aps = {{"near", MacAddress::parse("ac:00:00:00:00:01"), {0, 0}, -40},
                 {"far", MacAddress::parse("ac:00:00:00:00:02"), {10, 0}, -40},
                 {"gone", MacAddress::parse("ac:00:00:00:00:03"), {1000, 0}, -40}};
  s.clients = {{MacAddress::parse("aa:00:00:00:00:01"), {{0, {1, 0}}, {4000, {1, 0}}}},
               {MacAddress::parse("aa:00:00:00:00:02"), {{1000, {1, 0}}, {5000, {1, 0}}}}};
  return s;
}

std::string invalid_message(std::string_view json) {
  try {
    (void)parse_scenario(json);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_scenario);
    return e.what();
  }
  FAIL("expected invalid_scenario");
  return {};
}

}  // namespace

TEST_CASE("path loss model") {
  CHECK(rssi_model(1.0, -40, 0) == doctest::Approx(-40.0));
  CHECK(rssi_model(10.0, -40, 0) == doctest::Approx(-70.0));
  CHECK(rssi_model(2.0, -40, 0) == doctest::Approx(-49.03089986991944).epsilon(1e-14));
  CHECK(rssi_model(0.0, -40, 0) == rssi_model(0.1, -40, 0));
  CHECK(rssi_model(-5.0, -40, 0) == rssi_model(0.1, -40, 0));
  CHECK(rssi_model(0.1, -40, 0) == doctest::Approx(-10.0));
  CHECK(rssi_model(0.1, 0, 5) == 0.0);
  CHECK(rssi_model(1e9, -40, 0) == -100.0);
  CHECK(rssi_model(10.0, -40, 3.5) == doctest::Approx(-66.5));
  CHECK(rssi_model(10.0, -40, 0, 2.0) == doctest::Approx(-60.0));
}

TEST_CASE("noise stream matches the reference generator") {
  GaussianNoise g(20130301, 2.0);
  CHECK(g.next() == doctest::Approx(0.9043284197366213).epsilon(1e-12));
  CHECK(g.next() == doctest::Approx(-0.4991075529454975).epsilon(1e-12));
  CHECK(g.next() == doctest::Approx(0.651942921796208).epsilon(1e-12));
  CHECK(g.next() == doctest::Approx(-0.5382052580375255).epsilon(1e-12));

  GaussianNoise silent(1, 0.0);
  CHECK(silent.next() == 0.0);
}

TEST_CASE("noise moments") {
  GaussianNoise g(99, 3.0);
  double sum = 0;
  double sq = 0;
  constexpr int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double v = g.next();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::sqrt(sq / n) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("position interpolation") {
  const std::vector<Waypoint> path{{0, {0, 0}}, {1000, {10, 0}}, {1000, {10, 5}}, {3000, {10, 25}}};
  CHECK(position_at(path, -5) == Point{0, 0});
  CHECK(position_at(path, 500) == Point{5, 0});
  CHECK(position_at(path, 2000) == Point{10, 15});
  CHECK(position_at(path, 9999) == Point{10, 25});
}

TEST_CASE("stationary clients") {
  const auto records = simulate(stationary(0.0));
  REQUIRE(records.size() == 6);
  for (std::size_t i = 1; i < records.size(); ++i) CHECK(records[i - 1].t() <= records[i].t());
  CHECK(records[0].t() == 0);
  CHECK(records[1].t() == 1000);
  for (const auto& r : records) {
    // 1 m from "near", 9 m from "far", beyond the floor for "gone".
    REQUIRE(r.fingerprint.size() == 2);
    CHECK(r.fingerprint.find(MacAddress::parse("ac:00:00:00:00:01"))->rssi() == -40);
    CHECK(r.fingerprint.find(MacAddress::parse("ac:00:00:00:00:02"))->rssi() == -69);
    CHECK(r.fingerprint.find(MacAddress::parse("ac:00:00:00:00:03")) == nullptr);
  }
}

TEST_CASE("visibility floor") {
  auto s = stationary(0.0);
  s.visibility_floor_dbm = -60;
  for (const auto& r : simulate(s)) CHECK(r.fingerprint.size() == 1);
  s.visibility_floor_dbm = -100;
  for (const auto& r : simulate(s)) CHECK(r.fingerprint.size() == 3);
}

TEST_CASE("determinism") {
  for (double sigma : {0.0, 2.0}) {
    const auto a = simulate(stationary(sigma, 123));
    const auto b = simulate(stationary(sigma, 123));
    CHECK(a == b);
  }
  CHECK(simulate(stationary(2.0, 1)) != simulate(stationary(2.0, 2)));

  // Without noise, equal positions give equal fingerprints.
  const auto quiet = simulate(stationary(0.0));
  for (const auto& r : quiet) CHECK(r.fingerprint.observations() == quiet.front().fingerprint.observations());
}

TEST_CASE("per-client timestamps strictly increase") {
  const auto scenario = load_scenario_file(SPOTEX_TEST_DATA_DIR "/convoy_noisy.json");
  const auto records = simulate(scenario);
  std::map<MacAddress, Timestamp> last;
  for (const auto& r : records) {
    if (auto it = last.find(r.client); it != last.end()) CHECK(it->second < r.t());
    last[r.client] = r.t();
    for (const auto& [m, obs] : r.fingerprint.observations()) {
      CHECK(obs.rssi() >= scenario.visibility_floor_dbm);
      CHECK(obs.rssi() <= 0);
    }
  }
  CHECK(records.size() == 4 * 61);
  CHECK_NOTHROW(to_store(records));
}

TEST_CASE("scenario json") {
  const auto s = stationary(1.5, 42);
  const auto back = parse_scenario(scenario_to_json(s));
  CHECK(scenario_to_json(back) == scenario_to_json(s));
  CHECK(simulate(back) == simulate(s));

  const auto convoy = load_scenario_file(SPOTEX_TEST_DATA_DIR "/convoy.json");
  CHECK(convoy.clients.size() == 4);
  CHECK(convoy.seed == 20130301u);

  CHECK(invalid_message("{\n  \"schema\": 1,\n  \"seed\": ]\n}").starts_with("line 3, column 11"));
  CHECK(invalid_message("[]").starts_with("$"));
  CHECK(invalid_message("{\"schema\": 2}").starts_with("$.schema"));
  CHECK(invalid_message(R"({"schema": 1, "seed": -1, "venue": {"aps": []}, "clients": []})").starts_with("$.seed"));
  CHECK(invalid_message(R"({"schema": 1, "seed": 1, "venue": {"aps": [{"ssid": "x", "mac": "zz", "x": 0, "y": 0}]},
                           "clients": []})")
            .starts_with("$.venue.aps[0].mac"));
  CHECK(invalid_message(R"({"schema": 1, "seed": 1, "venue": {"aps": []},
                           "clients": [{"mac": "aa:00:00:00:00:01", "path": [{"t": 0, "x": 0}]}]})")
            .starts_with("$.clients[0].path[0]"));
  CHECK(invalid_message(R"({"schema": 1, "seed": 1, "venue": {"aps": []},
                           "clients": [{"mac": "aa:00:00:00:00:01", "path": []}]})")
            .find("no waypoints") != std::string::npos);
  CHECK(invalid_message(R"({"schema": 1, "seed": 1, "scan_period_ms": 0, "venue": {"aps": []}, "clients": []})")
            .find("scan_period_ms") != std::string::npos);
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), Error);
}
