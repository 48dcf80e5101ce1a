#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "learn/common.hpp"

namespace learn {

enum class Pattern { URD, TRD, BCT, BRS, BRT, TPS };

std::string_view to_string(Pattern p) noexcept;
/// Lower-case names: urd|trd|bct|brs|brt|tps.
Pattern parse_pattern(std::string_view s);

enum class TornadoOffset { Ceil, Floor };

struct TrafficRecord {
  Cycle cycle = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t size_bits = 0;
  /// Index of the conversation this packet belongs to, counted per source.
  std::uint32_t conversation = 0;

  friend bool operator==(const TrafficRecord&, const TrafficRecord&) = default;
};

struct TrafficParams {
  Pattern pattern = Pattern::URD;
  double rate = 0.01;
  Cycle horizon = 0;
  std::uint64_t seed = 1;
  double data_fraction = 0.5;
  std::uint32_t control_bits = 64;
  std::uint32_t data_bits = 576;
  /// Packets per conversation; 0 keeps one conversation (and one URD destination) per source.
  std::uint64_t session_length = 0;
  TornadoOffset tornado = TornadoOffset::Ceil;
  /// Empty means every node injects.
  std::vector<NodeId> injectors;
};

/// Throws ConfigError if `p` cannot be used on a width x height mesh.
void validate_pattern(Pattern p, int width, int height);

/// Destination of a deterministic pattern, nullopt when it maps src to itself.
/// URD has no deterministic destination and raises ConfigError here.
std::optional<NodeId> dest_for(Pattern p, NodeId src, int width, int height,
                               TornadoOffset tornado = TornadoOffset::Ceil);

/// Uniform over all nodes except src.
NodeId uniform_dest(NodeId src, std::size_t node_count, Rng& rng);

/// Bernoulli(rate) per injector per cycle, in (cycle, src) order.
std::vector<TrafficRecord> generate(const TrafficParams& params, int width, int height);

/// Lines "cycle src dst size_bits"; '#' starts a comment.
std::vector<TrafficRecord> parse_trace(std::istream& in, std::size_t node_count);
std::vector<TrafficRecord> load_trace(const std::string& path, std::size_t node_count);

}  // namespace learn
