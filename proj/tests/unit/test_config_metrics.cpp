#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "learn/config.hpp"
#include "learn/metrics.hpp"

using namespace learn;

namespace {

std::map<std::string, std::string> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config_text(in);
}

MetricsReport sample(const std::string& scheme, std::uint64_t total) {
  MetricsReport r;
  r.scheme = scheme;
  r.pattern = "urd";
  r.seed = 3;
  r.cycles = 1000;
  r.injected = 10;
  r.delivered = 10;
  r.total_noc_delay = total;
  r.mean_latency = static_cast<double>(total) / 10.0;
  return r;
}

}  // namespace

TEST(Config, FileThenOverridePrecedence) {
  auto file = parse("# experiment\nscheme = onion\nrate = 0.02   # light\n\ncycles = 5000\n");
  RunConfig cfg = build_config(file, {{"rate", "0.05"}});
  EXPECT_EQ(cfg.scheme, Scheme::Onion);
  EXPECT_DOUBLE_EQ(cfg.rate, 0.05);
  EXPECT_EQ(cfg.cycles, 5000u);
  EXPECT_EQ(cfg.width, 8);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  try {
    build_config(parse("rate = 1.5\n"), {});
    FAIL() << "rate 1.5 accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("rate"), std::string::npos);
  }
  try {
    build_config({}, {{"flit_size", "64"}});
    FAIL() << "unknown key accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("flit_size"), std::string::npos);
  }
  EXPECT_THROW(build_config({}, {{"cycles", "-4"}}), ConfigError);
  EXPECT_THROW(build_config({}, {{"evolve", "maybe"}}), ConfigError);
  EXPECT_THROW(build_config({}, {{"pattern", "tps"}, {"width", "4"}, {"height", "2"}}), ConfigError);
  EXPECT_THROW(parse("just words\n"), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/run.cfg"), IoError);
}

TEST(Config, EchoRoundTrips) {
  RunConfig cfg = build_config({}, {{"scheme", "learn-hardened"}, {"seed", "77"}, {"ri_mode", "flood"}});
  EXPECT_EQ(cfg.effective_pad_m(), 2u);
  EXPECT_TRUE(cfg.effective_evolve());
  RunConfig again = build_config(parse(cfg.echo()), {});
  EXPECT_EQ(again.echo(), cfg.echo());
  const std::string echo = cfg.echo();
  EXPECT_EQ(config_keys().size(), static_cast<std::size_t>(std::count(echo.begin(), echo.end(), '\n')));
}

TEST(Metrics, CsvHeaderIsFixed) {
  EXPECT_EQ(MetricsReport::csv_header(),
            "scheme,pattern,seed,cycles,injected,delivered,total_noc_delay,mean_latency,max_latency,ri,ra,rc,dt,"
            "crypto_cycles,keytable_bytes_max,sessions_ok,sessions_failed,drops");
  MetricsReport r = sample("learn", 1234);
  r.drops_by_cause["integrity"] = 2;
  r.drops_by_cause["table_full"] = 1;
  EXPECT_EQ(r.drops(), 3u);
  EXPECT_EQ(r.csv_row(), sample("learn", 1234).csv_row().substr(0, r.csv_row().rfind(',')) + ",3");
  EXPECT_NE(r.csv_row().find(",123.400,"), std::string::npos);
  EXPECT_NE(r.summary().find("total_noc_delay"), std::string::npos);
}

TEST(Metrics, CsvAppendAndReadBack) {
  auto path = std::filesystem::temp_directory_path() / "learn_metrics_test.csv";
  std::filesystem::remove(path);
  append_csv(path.string(), sample("none", 600));
  append_csv(path.string(), sample("onion", 1100));
  auto rows = read_report_csv(path.string());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].scheme, "onion");
  EXPECT_EQ(rows[1].total_noc_delay, 1100u);
  EXPECT_DOUBLE_EQ(rows[0].mean_latency, 60.0);
  std::filesystem::remove(path);
  EXPECT_THROW(parse_report_csv("a,b,c\n"), ParseError);
  EXPECT_THROW(parse_report_csv(MetricsReport::csv_header() + "\nnone,urd\n"), ParseError);
}

TEST(Compare, DeltasNormalizationAndImprovement) {
  std::vector<ReportRow> rows = {{"none", "urd", 3, 600, 6.0},
                                 {"onion", "urd", 3, 1100, 11.0},
                                 {"learn", "urd", 3, 660, 6.6},
                                 {"learn-hardened", "urd", 3, 770, 7.7}};
  Comparison c = compare_reports(rows);
  ASSERT_EQ(c.entries.size(), 4u);
  EXPECT_EQ(c.entries.front().scheme, "none");
  for (const auto& e : c.entries) {
    if (e.scheme == "none") EXPECT_NEAR(*e.delta_vs_none_pct, 0.0, 1e-9);
    if (e.scheme == "onion") {
      EXPECT_NEAR(*e.delta_vs_none_pct, 83.333, 1e-3);
      EXPECT_DOUBLE_EQ(e.normalized, 1.0);
    }
    if (e.scheme == "learn") EXPECT_NEAR(e.normalized, 0.6, 1e-12);
  }
  EXPECT_NEAR(*c.learn_improvement_pct, 40.0, 1e-9);
  EXPECT_NEAR(*c.hardened_improvement_pct, 30.0, 1e-9);
  EXPECT_FALSE(c.render().empty());
}

TEST(Compare, MismatchedRunsRejected) {
  EXPECT_THROW(compare_reports({}), ComparisonError);
  EXPECT_THROW(compare_reports({{"none", "urd", 3, 1, 1}, {"enc", "bct", 3, 1, 1}}), ComparisonError);
  EXPECT_THROW(compare_reports({{"none", "urd", 3, 1, 1}, {"enc", "urd", 4, 1, 1}}), ComparisonError);
  EXPECT_THROW(compare_reports({{"none", "urd", 3, 1, 1}, {"none", "urd", 3, 2, 1}}), ComparisonError);
  // An identical duplicate row is harmless.
  EXPECT_NO_THROW(compare_reports({{"none", "urd", 3, 1, 1}, {"none", "urd", 3, 1, 1}}));
  Comparison c = compare_reports({{"enc", "urd", 3, 10, 1}});
  EXPECT_FALSE(c.entries[0].delta_vs_none_pct);
  EXPECT_FALSE(c.learn_improvement_pct);
}
