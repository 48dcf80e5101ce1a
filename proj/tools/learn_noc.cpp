#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "learn/config.hpp"
#include "learn/experiment.hpp"
#include "learn/kernels.hpp"
#include "learn/metrics.hpp"

namespace fs = std::filesystem;
using namespace learn;

namespace {

struct RunFlags {
  std::string config;
  std::string scheme, pattern, trace, rate, cycles, width, height, seed, pad_m, out;
  bool evolve = false;
  bool trace_events = false;
  std::vector<std::string> sets;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "flat key = value config file");
  cmd->add_option("--scheme", f.scheme, "none|enc|onion|learn|learn-hardened");
  cmd->add_option("--pattern", f.pattern, "urd|trd|bct|brs|brt|tps");
  cmd->add_option("--trace", f.trace, "replay a 'cycle src dst size_bits' trace instead of a pattern");
  cmd->add_option("--rate", f.rate, "packets per node per cycle");
  cmd->add_option("--cycles", f.cycles, "injection horizon");
  cmd->add_option("--width", f.width);
  cmd->add_option("--height", f.height);
  cmd->add_option("--seed", f.seed);
  cmd->add_option("--pad-m", f.pad_m, "padding pairs added by the destination");
  cmd->add_flag("--evolve", f.evolve, "per-message x0 evolution");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--trace-events", f.trace_events, "write per-flit pipeline events to DIR/events.txt");
  cmd->add_option("--set", f.sets, "any configuration key as key=value")->take_all();
}

RunConfig resolve(const RunFlags& f) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const std::string& s : f.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s + ": --set expects key=value");
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) overrides.emplace_back(key, v);
  };
  put("scheme", f.scheme);
  put("pattern", f.pattern);
  put("trace", f.trace);
  put("rate", f.rate);
  put("cycles", f.cycles);
  put("width", f.width);
  put("height", f.height);
  put("seed", f.seed);
  put("pad_m", f.pad_m);
  put("out", f.out);
  if (f.evolve) overrides.emplace_back("evolve", "true");
  if (f.trace_events) overrides.emplace_back("trace_events", "true");

  if (f.config.empty()) return build_config({}, overrides);
  return load_config_file(f.config, overrides);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

int cmd_run(const RunFlags& flags) {
  RunConfig cfg = resolve(flags);
  if (cfg.trace_events && cfg.out.empty()) throw ConfigError("trace_events: needs an output directory (--out)");
  Experiment exp(cfg);

  std::ofstream events;
  if (!cfg.out.empty()) ensure_dir(cfg.out);
  if (cfg.trace_events) {
    fs::path p = fs::path(cfg.out) / "events.txt";
    events.open(p);
    if (!events) throw IoError("cannot write " + p.string());
    exp.taps().on_trace = [&events](const TraceEvent& e) { events << format_trace(e) << '\n'; };
  }

  MetricsReport report = exp.run();
  std::cout << report.summary();
  if (!cfg.out.empty()) {
    append_csv((fs::path(cfg.out) / "report.csv").string(), report);
    write_text(fs::path(cfg.out) / "summary.txt", report.summary());
  }
  if (!report.complete) {
    std::cerr << "run did not drain within drain_cap cycles\n";
    if (auto st = exp.stall()) std::cerr << st->describe();
    return static_cast<int>(ErrorCategory::Simulation);
  }
  return 0;
}

int cmd_sweep(const RunFlags& flags, const std::vector<std::string>& schemes) {
  RunConfig base = resolve(flags);
  if (!base.out.empty()) ensure_dir(base.out);
  std::vector<RunConfig> configs;
  for (const std::string& s : schemes) {
    RunConfig c = base;
    c.scheme = parse_scheme(s);
    c.trace_events = false;
    configs.push_back(c);
  }
  std::vector<MetricsReport> reports = run_sweep_parallel(configs);

  std::vector<ReportRow> rows;
  bool complete = true;
  for (const MetricsReport& r : reports) {
    std::cout << r.csv_row() << '\n';
    if (!base.out.empty()) append_csv((fs::path(base.out) / "report.csv").string(), r);
    rows.push_back({r.scheme, r.pattern, r.seed, r.total_noc_delay, r.mean_latency});
    complete = complete && r.complete;
  }
  std::cout << '\n' << compare_reports(rows).render();
  if (!complete) {
    std::cerr << "at least one run did not drain within drain_cap cycles\n";
    return static_cast<int>(ErrorCategory::Simulation);
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths) {
  std::vector<ReportRow> rows;
  for (const std::string& p : paths) {
    auto part = read_report_csv(p);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::cout << compare_reports(rows).render();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level mesh NoC simulator with LEARN and baseline security schemes"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "simulate one configuration");
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  std::vector<std::string> schemes = {"none", "enc", "onion", "learn", "learn-hardened"};
  CLI::App* sweep = app.add_subcommand("sweep", "run several schemes on one shared traffic stream");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--schemes", schemes, "schemes to run")->delimiter(',');

  std::vector<std::string> reports;
  CLI::App* compare = app.add_subcommand("compare", "compare report CSVs from runs sharing pattern and seed");
  compare->add_option("reports", reports, "report.csv files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags, schemes);
    return cmd_compare(reports);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
