#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spotex/fingerprint.hpp"

namespace spotex {

struct LogRecord {
  MacAddress client;
  Fingerprint fingerprint;

  [[nodiscard]] Timestamp t() const noexcept { return fingerprint.t(); }

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

/// Append-only, time-ordered store of per-client scans.
///
/// Timestamps must be nondecreasing per client, but clients may interleave
/// arbitrarily; the global view is kept sorted by time, with equal
/// timestamps in arrival order. Single writer; concurrent readers are safe
/// only while no append is in flight.
class LogStore {
 public:
  /// Throws Error(out_of_order_record) if rec is older than the client's last record.
  void append(LogRecord rec);

  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
  [[nodiscard]] const std::vector<LogRecord>& records() const noexcept { return records_; }
  [[nodiscard]] std::span<const LogRecord> client_records(const MacAddress& client) const;
  [[nodiscard]] std::vector<MacAddress> clients() const;

  /// Records with t_from <= t <= t_to in time order, optionally skipping one client.
  /// Throws Error(empty_window) when t_from > t_to.
  [[nodiscard]] std::vector<LogRecord> query_window(Timestamp t_from, Timestamp t_to,
                                                    std::optional<MacAddress> exclude_client = std::nullopt) const;

  /// One client's records with t_from <= t <= t_to, in time order.
  [[nodiscard]] std::span<const LogRecord> client_window(const MacAddress& client, Timestamp t_from,
                                                         Timestamp t_to) const;

  /// Latest record of `client` with t < strictly_before (the last appended on ties).
  [[nodiscard]] std::optional<LogRecord> previous_measurement(const MacAddress& client,
                                                              Timestamp strictly_before) const;

  /// Latest record of `client` with t <= at.
  [[nodiscard]] std::optional<LogRecord> latest_at_or_before(const MacAddress& client, Timestamp at) const;

 private:
  std::vector<LogRecord> records_;
  std::map<MacAddress, std::vector<LogRecord>> by_client_;
};

/// Scan-log line codec:
///   {"t": <ms>, "client": "<mac>", "aps": [{"ssid": "...", "mac": "...", "rssi": <int>}]}
std::string to_jsonl_line(const LogRecord& rec);
LogRecord parse_log_line(std::string_view line);

void save_jsonl(const LogStore& store, std::ostream& out);
/// Blank lines and lines starting with '#' are skipped. Errors name the 1-based line.
LogStore load_jsonl(std::istream& in);

LogStore load_log_file(const std::string& path);
void save_log_file(const LogStore& store, const std::string& path);

}  // namespace spotex
