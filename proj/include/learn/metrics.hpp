#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "learn/common.hpp"

namespace learn {

struct MetricsReport {
  std::string scheme;
  std::string pattern;
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;

  Cycle cycles = 0;
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t total_noc_delay = 0;
  double mean_latency = 0.0;
  std::uint64_t max_latency = 0;
  /// Cycles DTs spent at their source waiting for a handshake, before reaching the NI.
  std::uint64_t session_wait_cycles = 0;

  std::uint64_t ri = 0;
  std::uint64_t ra = 0;
  std::uint64_t rc = 0;
  std::uint64_t dt = 0;
  std::uint64_t baseline = 0;
  /// RI copies beyond the first per session in flood mode.
  std::uint64_t ri_duplicates = 0;

  std::uint64_t crypto_cycles = 0;
  std::vector<std::uint64_t> crypto_cycles_per_node;
  std::uint64_t keytable_bytes_max = 0;
  std::uint64_t keytable_rows_max = 0;
  std::uint64_t sessions_ok = 0;
  std::uint64_t sessions_failed = 0;
  std::map<std::string, std::uint64_t> drops_by_cause;
  std::uint64_t in_flight_at_end = 0;
  bool complete = true;
  std::string config_echo;

  std::uint64_t drops() const noexcept;

  static std::string csv_header();
  /// Fixed column order; mean latency with three decimals.
  std::string csv_row() const;
  /// Structured text with every metric and the echoed configuration.
  std::string summary() const;
};

/// One CSV data row read back for comparison.
struct ReportRow {
  std::string scheme;
  std::string pattern;
  std::uint64_t seed = 0;
  std::uint64_t total_noc_delay = 0;
  double mean_latency = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Reads every data row of a report CSV. Throws ParseError on a bad header or row.
std::vector<ReportRow> read_report_csv(const std::string& path);
std::vector<ReportRow> parse_report_csv(const std::string& text);

/// Appends one row, writing the header first if the file is new or empty.
void append_csv(const std::string& path, const MetricsReport& report);

struct ComparisonEntry {
  std::string scheme;
  std::uint64_t total_noc_delay = 0;
  /// Relative to the largest total in the table.
  double normalized = 0.0;
  /// Percent change against the NONE row when one is present.
  std::optional<double> delta_vs_none_pct;
};

struct Comparison {
  std::string pattern;
  std::uint64_t seed = 0;
  std::vector<ComparisonEntry> entries;
  /// 1 - LEARN/ONION as a percentage.
  std::optional<double> learn_improvement_pct;
  std::optional<double> hardened_improvement_pct;

  std::string render() const;
};

/// Throws ComparisonError if the rows disagree on pattern or seed, or give one scheme two results.
Comparison compare_reports(const std::vector<ReportRow>& rows);

}  // namespace learn
