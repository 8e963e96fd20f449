#pragma once

#include <stdexcept>
#include <string>

namespace spotex {

enum class ErrorCode {
  invalid_mac,
  invalid_rssi,
  duplicate_mac,
  no_scans,
  invalid_threshold,
  undefined_tanimoto,
  incomparable_rankings,
  degenerate,
  unknown_metric,
  proximity_log_required,
  out_of_order_record,
  empty_window,
  invalid_group_params,
  no_anchor_measurement,
  invalid_checkin,
  already_expired,
  invalid_scenario,
  malformed_input,
  invalid_argument,
  syntax_error,
  unknown_predicate,
  wrong_arity,
  invalid_interval,
};

/// Base exception for every recoverable failure in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spotex
