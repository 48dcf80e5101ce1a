#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "learn/traffic.hpp"

using namespace learn;

TEST(Patterns, HandComputedDestinations) {
  EXPECT_EQ(dest_for(Pattern::BCT, 5, 8, 8), 58u);
  EXPECT_EQ(dest_for(Pattern::BRS, 3, 8, 8), 48u);
  EXPECT_EQ(dest_for(Pattern::TPS, 10, 8, 8), 17u);
  EXPECT_EQ(dest_for(Pattern::TRD, 0, 8, 8), 27u);
  EXPECT_EQ(dest_for(Pattern::TRD, 0, 8, 8, TornadoOffset::Floor), 36u);
  EXPECT_EQ(dest_for(Pattern::BRT, 1, 8, 8), 32u);
  EXPECT_EQ(dest_for(Pattern::BRT, 6, 8, 8), 3u);
  // Fixed points map to themselves and produce no packet.
  EXPECT_FALSE(dest_for(Pattern::TPS, 9, 8, 8));
  EXPECT_FALSE(dest_for(Pattern::BRS, 0, 8, 8));
}

TEST(Patterns, InvolutionsAndPermutations) {
  for (NodeId s = 0; s < 64; ++s) {
    for (Pattern p : {Pattern::BCT, Pattern::BRS, Pattern::TPS}) {
      auto d = dest_for(p, s, 8, 8);
      if (d) EXPECT_EQ(dest_for(p, *d, 8, 8), s);
    }
  }
  // Rotating six times returns to the start.
  for (NodeId s = 0; s < 64; ++s) {
    NodeId cur = s;
    for (int i = 0; i < 6; ++i) cur = dest_for(Pattern::BRT, cur, 8, 8).value_or(cur);
    EXPECT_EQ(cur, s);
  }
}

TEST(Patterns, ShapeValidation) {
  EXPECT_THROW(validate_pattern(Pattern::BCT, 3, 4), ConfigError);
  EXPECT_THROW(validate_pattern(Pattern::TPS, 4, 2), ConfigError);
  EXPECT_NO_THROW(validate_pattern(Pattern::TRD, 3, 5));
  EXPECT_THROW(dest_for(Pattern::URD, 0, 8, 8), ConfigError);
  EXPECT_THROW(parse_pattern("hotspot"), ConfigError);
  EXPECT_EQ(parse_pattern("brt"), Pattern::BRT);
}

TEST(Generator, UniformDestNeverSelf) {
  Rng rng(1);
  std::map<NodeId, int> counts;
  for (int i = 0; i < 6300; ++i) {
    NodeId d = uniform_dest(7, 64, rng);
    ASSERT_NE(d, 7u);
    ASSERT_LT(d, 64u);
    ++counts[d];
  }
  EXPECT_EQ(counts.size(), 63u);
}

TEST(Generator, InjectionCountWithinThreeSigma) {
  TrafficParams p;
  p.rate = 0.05;
  p.horizon = 20000;
  p.seed = 42;
  auto recs = generate(p, 8, 8);
  const double trials = 20000.0 * 64;
  const double mean = trials * p.rate;
  const double sigma = std::sqrt(trials * p.rate * (1 - p.rate));
  EXPECT_LT(std::abs(static_cast<double>(recs.size()) - mean), 3 * sigma);
  std::size_t data = 0;
  for (const auto& r : recs) data += r.size_bits == 576;
  const double dsigma = std::sqrt(recs.size() * 0.25);
  EXPECT_LT(std::abs(static_cast<double>(data) - recs.size() * 0.5), 3 * dsigma);
}

TEST(Generator, OrderedAndDeterministic) {
  TrafficParams p;
  p.rate = 0.1;
  p.horizon = 500;
  p.seed = 9;
  auto a = generate(p, 4, 4);
  EXPECT_EQ(a, generate(p, 4, 4));
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_TRUE(a[i - 1].cycle < a[i].cycle || (a[i - 1].cycle == a[i].cycle && a[i - 1].src < a[i].src));
  }
  p.seed = 10;
  EXPECT_NE(a, generate(p, 4, 4));
}

TEST(Generator, SessionLengthGroupsConversations) {
  TrafficParams p;
  p.rate = 0.2;
  p.horizon = 2000;
  p.session_length = 5;
  auto recs = generate(p, 4, 4);
  std::map<std::pair<NodeId, std::uint32_t>, std::vector<NodeId>> conv;
  for (const auto& r : recs) conv[{r.src, r.conversation}].push_back(r.dst);
  for (const auto& [key, dsts] : conv) {
    EXPECT_LE(dsts.size(), 5u);
    for (NodeId d : dsts) EXPECT_EQ(d, dsts.front());
  }
  p.session_length = 0;
  for (const auto& r : generate(p, 4, 4)) EXPECT_EQ(r.conversation, 0u);
}

TEST(Generator, InjectorSubsetAndRateBounds) {
  TrafficParams p;
  p.rate = 0.3;
  p.horizon = 300;
  p.injectors = {2, 5};
  for (const auto& r : generate(p, 4, 4)) EXPECT_TRUE(r.src == 2 || r.src == 5);
  p.rate = 1.5;
  EXPECT_THROW(generate(p, 4, 4), ConfigError);
  p.rate = 0.0;
  EXPECT_TRUE(generate(p, 4, 4).empty());
}

TEST(Trace, ParsesCommentsAndBlankLines) {
  std::istringstream in("# header\n\n0 1 2 64\n3 2 1 576  # data\n3 0 5 64\n");
  auto recs = parse_trace(in, 16);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1], (TrafficRecord{3, 2, 1, 576, 0}));
}

TEST(Trace, RejectsMalformedLines) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_trace(in, 16);
  };
  EXPECT_THROW(parse("0 1 2\n"), ParseError);
  EXPECT_THROW(parse("0 1 2 64 9\n"), ParseError);
  EXPECT_THROW(parse("x 1 2 64\n"), ParseError);
  EXPECT_THROW(parse("0 1 2 0\n"), ParseError);
  EXPECT_THROW(parse("0 1 16 64\n"), ConfigError);
  EXPECT_THROW(parse("0 3 3 64\n"), ConfigError);
  EXPECT_THROW(parse("5 1 2 64\n4 1 2 64\n"), ConfigError);
  EXPECT_THROW(load_trace("/nonexistent/trace.txt", 16), IoError);
}
