#include "spotex/proxlog.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "spotex/ap_json.hpp"
#include "spotex/error.hpp"

namespace spotex {
namespace {

const auto by_time_upper = [](Timestamp t, const LogRecord& rec) { return t < rec.t(); };
const auto by_time_lower = [](const LogRecord& rec, Timestamp t) { return rec.t() < t; };

}  // namespace

void LogStore::append(LogRecord rec) {
  auto& mine = by_client_[rec.client];
  if (!mine.empty() && rec.t() < mine.back().t()) {
    throw Error(ErrorCode::out_of_order_record, "out-of-order record for client " + rec.client.to_string() + ": t=" +
                                                    std::to_string(rec.t()) + " < " + std::to_string(mine.back().t()));
  }
  auto pos = std::upper_bound(records_.begin(), records_.end(), rec.t(), by_time_upper);
  records_.insert(pos, rec);
  mine.push_back(std::move(rec));
}

std::span<const LogRecord> LogStore::client_records(const MacAddress& client) const {
  auto it = by_client_.find(client);
  if (it == by_client_.end()) return {};
  return it->second;
}

std::vector<MacAddress> LogStore::clients() const {
  std::vector<MacAddress> out;
  out.reserve(by_client_.size());
  for (const auto& entry : by_client_) out.push_back(entry.first);
  return out;
}

std::vector<LogRecord> LogStore::query_window(Timestamp t_from, Timestamp t_to,
                                              std::optional<MacAddress> exclude_client) const {
  if (t_from > t_to) throw Error(ErrorCode::empty_window, "empty window");
  auto first = std::lower_bound(records_.begin(), records_.end(), t_from, by_time_lower);
  auto last = std::upper_bound(first, records_.end(), t_to, by_time_upper);
  std::vector<LogRecord> out;
  for (auto it = first; it != last; ++it) {
    if (exclude_client && it->client == *exclude_client) continue;
    out.push_back(*it);
  }
  return out;
}

std::span<const LogRecord> LogStore::client_window(const MacAddress& client, Timestamp t_from,
                                                   Timestamp t_to) const {
  const auto recs = client_records(client);
  if (t_from > t_to) return {};
  auto first = std::lower_bound(recs.begin(), recs.end(), t_from, by_time_lower);
  auto last = std::upper_bound(first, recs.end(), t_to, by_time_upper);
  return {first, last};
}

std::optional<LogRecord> LogStore::previous_measurement(const MacAddress& client, Timestamp strictly_before) const {
  const auto recs = client_records(client);
  auto it = std::lower_bound(recs.begin(), recs.end(), strictly_before, by_time_lower);
  if (it == recs.begin()) return std::nullopt;
  return *std::prev(it);
}

std::optional<LogRecord> LogStore::latest_at_or_before(const MacAddress& client, Timestamp at) const {
  const auto recs = client_records(client);
  auto it = std::upper_bound(recs.begin(), recs.end(), at, by_time_upper);
  if (it == recs.begin()) return std::nullopt;
  return *std::prev(it);
}

std::string to_jsonl_line(const LogRecord& rec) {
  nlohmann::ordered_json j;
  j["t"] = rec.t();
  j["client"] = rec.client.to_string();
  j["aps"] = detail::aps_to_json(rec.fingerprint);
  return j.dump();
}

LogRecord parse_log_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_input, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::malformed_input, "record must be a JSON object");
  const auto t = detail::require_timestamp(j, "t");
  const auto client = MacAddress::parse(detail::require_string(j, "client"));
  auto aps_it = j.find("aps");
  if (aps_it == j.end()) throw Error(ErrorCode::malformed_input, "missing field \"aps\"");
  const auto aps = detail::aps_from_json(*aps_it);
  return {client, Fingerprint(t, aps)};
}

void save_jsonl(const LogStore& store, std::ostream& out) {
  for (const auto& rec : store.records()) out << to_jsonl_line(rec) << '\n';
}

LogStore load_jsonl(std::istream& in) {
  LogStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    try {
      store.append(parse_log_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

LogStore load_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::malformed_input, "cannot open " + path);
  return load_jsonl(in);
}

void save_log_file(const LogStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::malformed_input, "cannot write " + path);
  save_jsonl(store, out);
}

}  // namespace spotex
