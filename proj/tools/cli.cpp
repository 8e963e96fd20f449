#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spotex/checkin.hpp"
#include "spotex/engine.hpp"
#include "spotex/error.hpp"
#include "spotex/groups.hpp"
#include "spotex/metrics.hpp"
#include "spotex/proxlog.hpp"
#include "spotex/rules.hpp"
#include "spotex/simulator.hpp"

namespace spotex::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, std::int64_t> parse_attrs(const std::vector<std::string>& items) {
  std::map<std::string, std::int64_t> attrs;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("attribute must be key=value: " + item);
    try {
      std::size_t used = 0;
      const auto value = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
      attrs[item.substr(0, eq)] = value;
    } catch (const std::logic_error&) {
      throw InputError("attribute value must be an integer: " + item);
    }
  }
  return attrs;
}

Fingerprint fingerprint_from_aps(const std::string& aps_json, Timestamp t) {
  nlohmann::json aps;
  try {
    aps = nlohmann::json::parse(aps_json);
  } catch (const nlohmann::json::parse_error&) {
    throw InputError("--aps is not valid JSON");
  }
  nlohmann::json wrapper = {{"t", t}, {"client", "00:00:00:00:00:00"}, {"aps", aps}};
  return parse_log_line(wrapper.dump()).fingerprint;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = parse_scenario(read_file(scenario_path));
  } catch (const Error& e) {
    err << scenario_path << ": " << e.what() << '\n';
    return kExitInputError;
  }
  if (const char* seed = std::getenv("SPOTEX_SEED"); seed != nullptr && *seed != '\0') {
    try {
      scenario.seed = std::stoull(seed);
    } catch (const std::logic_error&) {
      throw InputError(std::string("SPOTEX_SEED is not an unsigned integer: ") + seed);
    }
  }
  const auto store = to_store(simulate(scenario));
  save_log_file(store, out_path);
  return kExitOk;
}

int cmd_rules_check(const std::string& rules_path, std::ostream& out, std::ostream& err) {
  const auto source = read_file(rules_path);
  try {
    const auto rules = parse_rules(source);
    out << rules.size() << (rules.size() == 1 ? " rule" : " rules") << '\n';
    return kExitOk;
  } catch (const ParseError& e) {
    err << rules_path << ":" << e.line() << ":" << e.column() << ": " << e.what() << '\n';
    return kExitInputError;
  }
}

struct ReplayOptions {
  std::string rules_path;
  std::string log_path;
  std::string client;
  std::int64_t delta_ms = GroupTuning{}.delta_ms;
  double omega_db = GroupTuning{}.omega_db;
  int utc_offset_min = 0;
  std::vector<std::string> attrs;
};

int cmd_replay(const ReplayOptions& opt, std::ostream& out) {
  const auto rules = parse_rules(read_file(opt.rules_path));
  const auto log = load_log_file(opt.log_path);
  const auto client = MacAddress::parse(opt.client);
  const auto attrs = parse_attrs(opt.attrs);

  // The proximity log grows as the replay clock advances, so IN_GROUP_OF
  // never sees measurements from the future.
  LogStore visible;
  VisitHistory history;
  const auto& all = log.records();
  std::size_t fed = 0;
  for (const auto& rec : log.client_records(client)) {
    while (fed < all.size() && all[fed].t() <= rec.t()) visible.append(all[fed++]);
    EvalContext ctx{rec.fingerprint,
                    TimeOfDay::from_timestamp(rec.t(), opt.utc_offset_min),
                    client,
                    attrs,
                    &history,
                    &visible,
                    {opt.delta_ms, opt.omega_db}};
    for (const auto& firing : match_all(rules, ctx)) {
      ordered_json line;
      line["t"] = rec.t();
      line["rule"] = firing.rule_id;
      line["message"] = firing.message;
      out << line.dump() << '\n';
    }
  }
  return kExitOk;
}

struct GroupsOptions {
  std::string log_path;
  std::string client;
  std::optional<std::int64_t> t0;
  std::int64_t t_max_s = 60;
  std::int64_t delta_ms = GroupTuning{}.delta_ms;
  double omega_db = GroupTuning{}.omega_db;
  bool oracle = false;
};

int cmd_groups(const GroupsOptions& opt, std::ostream& out, std::ostream& err) {
  const auto store = load_log_file(opt.log_path);
  const auto client = MacAddress::parse(opt.client);
  const auto mine = store.client_records(client);
  if (mine.empty()) throw InputError("no records for client " + client.to_string());

  GroupParams params{opt.delta_ms, opt.omega_db, opt.t0.value_or(mine.back().t()), opt.t_max_s * 1000};
  const auto anchor = store.latest_at_or_before(client, params.t0);
  if (!anchor) throw Error(ErrorCode::no_anchor_measurement, "no anchor measurement at or before t0");

  const auto group = detect_group(store, client, anchor->fingerprint, params);
  auto members = ordered_json::array();
  for (const auto& mac : group) members.push_back(mac.to_string());
  out << members.dump() << '\n';

  if (opt.oracle) {
    const auto expected = brute_force_group(store, client, anchor->fingerprint, params);
    if (expected != group) {
      auto oracle_members = ordered_json::array();
      for (const auto& mac : expected) oracle_members.push_back(mac.to_string());
      err << "oracle mismatch: brute force found " << oracle_members.dump() << '\n';
      return kExitMismatch;
    }
  }
  return kExitOk;
}

int cmd_metrics(const std::string& log_path, const std::string& client_a, const std::string& client_b,
                const std::string& metric_name, std::ostream& out) {
  const auto store = load_log_file(log_path);
  const auto average_of = [&](const std::string& who) {
    const auto mac = MacAddress::parse(who);
    const auto recs = store.client_records(mac);
    if (recs.empty()) throw InputError("no records for client " + mac.to_string());
    std::vector<Fingerprint> scans;
    for (const auto& rec : recs) scans.push_back(rec.fingerprint);
    return average_vector(scans);
  };
  const auto a = average_of(client_a);
  const auto b = average_of(client_b);

  ordered_json result;
  result["metric"] = metric_name;
  if (metric_name == "spearman") {
    result["value"] = aligned_rank_correlation(a, b);
  } else {
    result["value"] = distance(a, b, parse_metric(metric_name)).value;
  }
  out << result.dump() << '\n';
  return kExitOk;
}

CheckInRegistry read_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  return load_registry(in);
}

void write_registry(const CheckInRegistry& registry, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  save_registry(registry, out);
}

struct CheckinOptions {
  std::string registry_path;
  std::string identity;
  std::string aps = "[]";
  std::int64_t t = 0;
  std::optional<std::int64_t> now;
  std::int64_t ttl_s = kDefaultCheckinTtlMs / 1000;
  std::vector<std::string> attrs;
  std::string metric = "euclidean";
  double threshold = 0.0;
};

int cmd_checkin_add(const CheckinOptions& opt, std::ostream& out) {
  auto registry = read_registry(opt.registry_path);
  auto rec = CheckInRecord::with_ttl(opt.identity, fingerprint_from_aps(opt.aps, opt.t), opt.ttl_s * 1000,
                                     parse_attrs(opt.attrs));
  const auto expires = rec.expires_at;
  registry.register_checkin(std::move(rec), opt.now.value_or(opt.t));
  write_registry(registry, opt.registry_path);
  out << ordered_json{{"identity", opt.identity}, {"expires_at", expires}}.dump() << '\n';
  return kExitOk;
}

int cmd_checkin_nearby(const CheckinOptions& opt, std::ostream& out) {
  const auto registry = read_registry(opt.registry_path);
  const Timestamp now = opt.now.value_or(opt.t);
  const auto probe = fingerprint_from_aps(opt.aps, now);
  for (const auto& hit : registry.nearby_checkins(probe, parse_metric(opt.metric), opt.threshold, now)) {
    out << ordered_json{{"identity", hit.identity}, {"distance", hit.distance}}.dump() << '\n';
  }
  return kExitOk;
}

int cmd_checkin_expire(const CheckinOptions& opt, std::ostream& out) {
  auto registry = read_registry(opt.registry_path);
  const auto removed = registry.expire(opt.now.value_or(opt.t));
  write_registry(registry, opt.registry_path);
  out << ordered_json{{"removed", removed}, {"remaining", registry.size()}}.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wi-Fi proximity rules, groups and check-ins", "spotex"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario and write a JSONL scan log");
  simulate_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();
  simulate_cmd->add_option("out", sim_out, "Output scan log (JSONL)")->required();

  std::string rules_path;
  auto* check_cmd = app.add_subcommand("rules-check", "Parse a rules file and report the rule count");
  check_cmd->add_option("rules", rules_path, "Rules file (.spotex)")->required();

  ReplayOptions replay;
  auto* replay_cmd = app.add_subcommand("replay", "Replay one client's scans through the rules");
  replay_cmd->add_option("rules", replay.rules_path, "Rules file")->required();
  replay_cmd->add_option("log", replay.log_path, "Scan log (JSONL)")->required();
  replay_cmd->add_option("--client", replay.client, "Client mac")->required();
  replay_cmd->add_option("--delta", replay.delta_ms, "IN_GROUP_OF time tolerance, ms")->capture_default_str();
  replay_cmd->add_option("--omega", replay.omega_db, "IN_GROUP_OF RSSI tolerance, dB")->capture_default_str();
  replay_cmd->add_option("--utc-offset", replay.utc_offset_min, "Local clock offset from UTC, minutes")
      ->capture_default_str();
  replay_cmd->add_option("--attr", replay.attrs, "Client attribute key=value (repeatable)");

  GroupsOptions groups;
  auto* groups_cmd = app.add_subcommand("groups", "Detect the group travelling with a client");
  groups_cmd->add_option("log", groups.log_path, "Scan log (JSONL)")->required();
  groups_cmd->add_option("--client", groups.client, "Client mac")->required();
  groups_cmd->add_option("--t0", groups.t0, "Query time, ms (default: client's last scan)");
  groups_cmd->add_option("--tmax", groups.t_max_s, "Required co-travel, s")->capture_default_str();
  groups_cmd->add_option("--delta", groups.delta_ms, "Time tolerance, ms")->capture_default_str();
  groups_cmd->add_option("--omega", groups.omega_db, "RSSI tolerance, dB")->capture_default_str();
  groups_cmd->add_flag("--oracle", groups.oracle, "Cross-check against the brute-force oracle");

  std::string metrics_log;
  std::string client_a;
  std::string client_b;
  std::string metric_name;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compare two clients' averaged fingerprints");
  metrics_cmd->add_option("log", metrics_log, "Scan log (JSONL)")->required();
  metrics_cmd->add_option("--client-a", client_a, "First client mac")->required();
  metrics_cmd->add_option("--client-b", client_b, "Second client mac")->required();
  metrics_cmd->add_option("--metric", metric_name, "euclidean, tanimoto or spearman")
      ->required()
      ->check(CLI::IsMember({"euclidean", "tanimoto", "spearman"}));

  CheckinOptions checkin;
  auto* checkin_cmd = app.add_subcommand("checkin", "Manipulate a file-backed check-in registry");
  checkin_cmd->add_option("registry", checkin.registry_path, "Registry file (JSONL)")->required();
  checkin_cmd->require_subcommand(1);
  auto* add_cmd = checkin_cmd->add_subcommand("add", "Register a check-in");
  add_cmd->add_option("--identity", checkin.identity, "Account id")->required();
  add_cmd->add_option("--aps", checkin.aps, "JSON array of {ssid, mac, rssi}")->required();
  add_cmd->add_option("--t", checkin.t, "Scan time, ms")->required();
  add_cmd->add_option("--ttl", checkin.ttl_s, "Lifetime, s")->capture_default_str();
  add_cmd->add_option("--now", checkin.now, "Current time, ms (default: --t)");
  add_cmd->add_option("--attr", checkin.attrs, "Attribute key=value (repeatable)");
  auto* nearby_cmd = checkin_cmd->add_subcommand("nearby", "List check-ins near a probe fingerprint");
  nearby_cmd->add_option("--aps", checkin.aps, "JSON array of {ssid, mac, rssi}")->required();
  nearby_cmd->add_option("--now", checkin.now, "Current time, ms")->required();
  nearby_cmd->add_option("--metric", checkin.metric, "euclidean or tanimoto")->capture_default_str();
  nearby_cmd->add_option("--threshold", checkin.threshold, "Maximum distance")->required();
  auto* expire_cmd = checkin_cmd->add_subcommand("expire", "Drop expired check-ins");
  expire_cmd->add_option("--now", checkin.now, "Current time, ms")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(scenario_path, sim_out, err);
    if (*check_cmd) return cmd_rules_check(rules_path, out, err);
    if (*replay_cmd) return cmd_replay(replay, out);
    if (*groups_cmd) return cmd_groups(groups, out, err);
    if (*metrics_cmd) return cmd_metrics(metrics_log, client_a, client_b, metric_name, out);
    if (*add_cmd) return cmd_checkin_add(checkin, out);
    if (*nearby_cmd) return cmd_checkin_nearby(checkin, out);
    if (*expire_cmd) return cmd_checkin_expire(checkin, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace spotex::cli
