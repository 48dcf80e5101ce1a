#include "learn/metrics.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace learn {

namespace {

constexpr const char* kColumns[] = {"scheme",         "pattern",     "seed",          "cycles",
                                    "injected",       "delivered",   "total_noc_delay", "mean_latency",
                                    "max_latency",    "ri",          "ra",            "rc",
                                    "dt",             "crypto_cycles", "keytable_bytes_max", "sessions_ok",
                                    "sessions_failed", "drops"};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int scheme_rank(const std::string& s) {
  static const char* order[] = {"none", "learn", "learn-hardened", "enc", "onion"};
  for (int i = 0; i < 5; ++i) {
    if (s == order[i]) return i;
  }
  return 5;
}

}  // namespace

std::uint64_t MetricsReport::drops() const noexcept {
  std::uint64_t n = 0;
  for (const auto& [cause, count] : drops_by_cause) n += count;
  return n;
}

std::string MetricsReport::csv_header() {
  std::string h;
  for (const char* c : kColumns) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h;
}

std::string MetricsReport::csv_row() const {
  std::ostringstream os;
  os << scheme << ',' << pattern << ',' << seed << ',' << cycles << ',' << injected << ',' << delivered << ','
     << total_noc_delay << ',' << std::fixed << std::setprecision(3) << mean_latency << ',' << max_latency << ','
     << ri << ',' << ra << ',' << rc << ',' << dt << ',' << crypto_cycles << ',' << keytable_bytes_max << ','
     << sessions_ok << ',' << sessions_failed << ',' << drops();
  return os.str();
}

std::string MetricsReport::summary() const {
  std::ostringstream os;
  os << "[run]\n"
     << "scheme = " << scheme << "\npattern = " << pattern << "\nseed = " << seed << "\nmesh = " << width << "x"
     << height << "\ncycles = " << cycles << "\ncomplete = " << (complete ? "true" : "false")
     << "\nin_flight_at_end = " << in_flight_at_end << "\n\n[packets]\n"
     << "injected = " << injected << "\ndelivered = " << delivered << "\nri = " << ri << "\nra = " << ra
     << "\nrc = " << rc << "\ndt = " << dt << "\nbaseline = " << baseline << "\nri_duplicates = " << ri_duplicates
     << "\n\n[latency]\n"
     << "total_noc_delay = " << total_noc_delay << "\nmean_latency = " << std::fixed << std::setprecision(3)
     << mean_latency << "\nmax_latency = " << max_latency << "\nsession_wait_cycles = " << session_wait_cycles
     << "\n\n[crypto]\n"
     << "crypto_cycles = " << crypto_cycles << "\nper_node =";
  for (std::uint64_t c : crypto_cycles_per_node) os << ' ' << c;
  os << "\n\n[sessions]\n"
     << "sessions_ok = " << sessions_ok << "\nsessions_failed = " << sessions_failed
     << "\nkeytable_rows_max = " << keytable_rows_max << "\nkeytable_bytes_max = " << keytable_bytes_max
     << "\n\n[drops]\n";
  for (const auto& [cause, count] : drops_by_cause) os << cause << " = " << count << '\n';
  os << "\n[config]\n" << config_echo;
  return os.str();
}

void append_csv(const std::string& path, const MetricsReport& report) {
  namespace fs = std::filesystem;
  std::error_code ec;
  bool fresh = !fs::exists(path, ec) || fs::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write report " + path);
  if (fresh) out << MetricsReport::csv_header() << '\n';
  out << report.csv_row() << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != MetricsReport::csv_header()) {
    throw ParseError("report does not start with the expected CSV header");
  }
  std::vector<ReportRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != std::size(kColumns)) {
      throw ParseError("report row " + std::to_string(lineno) + ": expected " + std::to_string(std::size(kColumns)) +
                       " columns");
    }
    try {
      ReportRow r;
      r.scheme = cells[0];
      r.pattern = cells[1];
      r.seed = std::stoull(cells[2]);
      r.total_noc_delay = std::stoull(cells[6]);
      r.mean_latency = std::stod(cells[7]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError("report row " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

std::vector<ReportRow> read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_report_csv(os.str());
}

Comparison compare_reports(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw ComparisonError("no report rows to compare");
  Comparison cmp;
  cmp.pattern = rows.front().pattern;
  cmp.seed = rows.front().seed;

  std::map<std::string, ReportRow> by_scheme;
  for (const ReportRow& r : rows) {
    if (r.pattern != cmp.pattern || r.seed != cmp.seed) {
      throw ComparisonError("reports disagree: " + cmp.pattern + "/seed " + std::to_string(cmp.seed) + " vs " +
                            r.pattern + "/seed " + std::to_string(r.seed));
    }
    auto [it, inserted] = by_scheme.emplace(r.scheme, r);
    if (!inserted && !(it->second == r)) {
      throw ComparisonError("scheme " + r.scheme + " appears with two different results");
    }
  }

  std::uint64_t largest = 0;
  for (const auto& [s, r] : by_scheme) largest = std::max(largest, r.total_noc_delay);
  std::optional<std::uint64_t> none;
  if (auto it = by_scheme.find("none"); it != by_scheme.end()) none = it->second.total_noc_delay;

  for (const auto& [s, r] : by_scheme) {
    ComparisonEntry e;
    e.scheme = s;
    e.total_noc_delay = r.total_noc_delay;
    e.normalized = largest == 0 ? 0.0 : static_cast<double>(r.total_noc_delay) / static_cast<double>(largest);
    if (none && *none > 0) {
      e.delta_vs_none_pct =
          100.0 * (static_cast<double>(r.total_noc_delay) - static_cast<double>(*none)) / static_cast<double>(*none);
    }
    cmp.entries.push_back(e);
  }
  std::stable_sort(cmp.entries.begin(), cmp.entries.end(), [](const ComparisonEntry& a, const ComparisonEntry& b) {
    return scheme_rank(a.scheme) < scheme_rank(b.scheme);
  });

  auto improvement = [&](const char* scheme) -> std::optional<double> {
    auto l = by_scheme.find(scheme);
    auto o = by_scheme.find("onion");
    if (l == by_scheme.end() || o == by_scheme.end() || o->second.total_noc_delay == 0) return std::nullopt;
    return 100.0 * (1.0 - static_cast<double>(l->second.total_noc_delay) /
                              static_cast<double>(o->second.total_noc_delay));
  };
  cmp.learn_improvement_pct = improvement("learn");
  cmp.hardened_improvement_pct = improvement("learn-hardened");
  return cmp;
}

std::string Comparison::render() const {
  std::ostringstream os;
  os << "pattern " << pattern << ", seed " << seed << "\n";
  os << std::left << std::setw(16) << "scheme" << std::right << std::setw(18) << "total_noc_delay" << std::setw(12)
     << "normalized" << std::setw(14) << "vs_none" << "\n";
  os << std::fixed;
  for (const ComparisonEntry& e : entries) {
    os << std::left << std::setw(16) << e.scheme << std::right << std::setw(18) << e.total_noc_delay
       << std::setw(12) << std::setprecision(3) << e.normalized;
    if (e.delta_vs_none_pct) {
      std::ostringstream d;
      d << std::fixed << std::setprecision(1) << std::showpos << *e.delta_vs_none_pct << '%';
      os << std::setw(14) << d.str();
    } else {
      os << std::setw(14) << "-";
    }
    os << "\n";
  }
  os << std::setprecision(1);
  if (learn_improvement_pct) os << "learn improvement vs onion: " << *learn_improvement_pct << "%\n";
  if (hardened_improvement_pct) os << "learn-hardened improvement vs onion: " << *hardened_improvement_pct << "%\n";
  return os.str();
}

}  // namespace learn
