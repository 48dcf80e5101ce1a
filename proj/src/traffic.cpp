#include "learn/traffic.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace learn {

std::string_view to_string(Pattern p) noexcept {
  switch (p) {
    case Pattern::URD: return "urd";
    case Pattern::TRD: return "trd";
    case Pattern::BCT: return "bct";
    case Pattern::BRS: return "brs";
    case Pattern::BRT: return "brt";
    case Pattern::TPS: return "tps";
  }
  return "?";
}

Pattern parse_pattern(std::string_view s) {
  if (s == "urd") return Pattern::URD;
  if (s == "trd") return Pattern::TRD;
  if (s == "bct") return Pattern::BCT;
  if (s == "brs") return Pattern::BRS;
  if (s == "brt") return Pattern::BRT;
  if (s == "tps") return Pattern::TPS;
  throw ConfigError("pattern: unknown value '" + std::string(s) + "'");
}

void validate_pattern(Pattern p, int width, int height) {
  auto n = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  switch (p) {
    case Pattern::BCT:
    case Pattern::BRS:
    case Pattern::BRT:
      if (!std::has_single_bit(n)) {
        throw ConfigError("pattern: " + std::string(to_string(p)) + " needs a power-of-two node count, got " +
                          std::to_string(n));
      }
      break;
    case Pattern::TPS:
      if (width != height) throw ConfigError("pattern: tps needs a square mesh");
      break;
    case Pattern::URD:
    case Pattern::TRD: break;
  }
}

std::optional<NodeId> dest_for(Pattern p, NodeId src, int width, int height, TornadoOffset tornado) {
  validate_pattern(p, width, height);
  const auto n = static_cast<std::uint32_t>(width * height);
  const int bits = std::countr_zero(std::bit_ceil(n));
  const std::uint32_t mask = n - 1;
  const int x = static_cast<int>(src) % width;
  const int y = static_cast<int>(src) / width;
  std::uint32_t d = src;
  switch (p) {
    case Pattern::URD: throw ConfigError("pattern: urd has no deterministic destination");
    case Pattern::BCT: d = ~src & mask; break;
    case Pattern::BRS: {
      d = 0;
      for (int i = 0; i < bits; ++i) {
        if (src & (1u << i)) d |= 1u << (bits - 1 - i);
      }
      break;
    }
    case Pattern::BRT: d = bits == 0 ? src : ((src >> 1) | ((src & 1u) << (bits - 1))) & mask; break;
    case Pattern::TPS: d = static_cast<std::uint32_t>(x * width + y); break;
    case Pattern::TRD: {
      int ox = tornado == TornadoOffset::Ceil ? (width + 1) / 2 - 1 : width / 2;
      int oy = tornado == TornadoOffset::Ceil ? (height + 1) / 2 - 1 : height / 2;
      d = static_cast<std::uint32_t>(((y + oy) % height) * width + (x + ox) % width);
      break;
    }
  }
  if (d == src) return std::nullopt;
  return d;
}

NodeId uniform_dest(NodeId src, std::size_t node_count, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, node_count - 2);
  auto d = static_cast<NodeId>(pick(rng));
  return d >= src ? d + 1 : d;
}

std::vector<TrafficRecord> generate(const TrafficParams& params, int width, int height) {
  if (!(params.rate >= 0.0 && params.rate <= 1.0)) throw ConfigError("rate: must lie in [0, 1]");
  validate_pattern(params.pattern, width, height);
  const std::size_t n = static_cast<std::size_t>(width) * height;

  std::vector<NodeId> injectors = params.injectors;
  if (injectors.empty()) {
    for (NodeId i = 0; i < n; ++i) injectors.push_back(i);
  }

  struct Source {
    Rng rng;
    std::optional<NodeId> dst;
    std::uint64_t sent = 0;
  };
  std::vector<Source> sources;
  sources.reserve(injectors.size());
  for (NodeId id : injectors) sources.push_back({Rng(derive_seed(params.seed, 0x747266ULL, id)), {}, 0});

  std::vector<TrafficRecord> out;
  if (params.rate <= 0.0) return out;
  out.reserve(static_cast<std::size_t>(params.rate * static_cast<double>(params.horizon * injectors.size()) * 1.1) + 16);
  std::bernoulli_distribution inject(params.rate);
  std::bernoulli_distribution is_data(params.data_fraction);

  for (Cycle t = 0; t < params.horizon; ++t) {
    for (std::size_t i = 0; i < injectors.size(); ++i) {
      Source& s = sources[i];
      if (!inject(s.rng)) continue;
      const NodeId src = injectors[i];
      const std::uint32_t bits = is_data(s.rng) ? params.data_bits : params.control_bits;
      std::optional<NodeId> dst;
      if (params.pattern == Pattern::URD) {
        bool redraw = !s.dst || (params.session_length > 0 && s.sent % params.session_length == 0);
        if (redraw) s.dst = uniform_dest(src, n, s.rng);
        dst = s.dst;
      } else {
        dst = dest_for(params.pattern, src, width, height, params.tornado);
      }
      if (!dst) continue;
      auto conversation = static_cast<std::uint32_t>(params.session_length > 0 ? s.sent / params.session_length : 0);
      ++s.sent;
      out.push_back({t, src, *dst, bits, conversation});
    }
  }
  return out;
}

std::vector<TrafficRecord> parse_trace(std::istream& in, std::size_t node_count) {
  std::vector<TrafficRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    std::istringstream fields(line);
    long long cycle = -1;
    long long src = -1;
    long long dst = -1;
    long long bits = -1;
    std::string extra;
    if (!(fields >> cycle >> src >> dst >> bits) || (fields >> extra) || cycle < 0 || src < 0 || dst < 0 ||
        bits <= 0) {
      throw ParseError("trace line " + std::to_string(lineno) + ": expected 'cycle src dst size_bits'");
    }
    if (static_cast<std::size_t>(src) >= node_count || static_cast<std::size_t>(dst) >= node_count) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": node id outside the mesh");
    }
    if (src == dst) throw ConfigError("trace line " + std::to_string(lineno) + ": source equals destination");
    if (!out.empty() && static_cast<Cycle>(cycle) < out.back().cycle) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": cycles must be non-decreasing");
    }
    out.push_back({static_cast<Cycle>(cycle), static_cast<NodeId>(src), static_cast<NodeId>(dst),
                   static_cast<std::uint32_t>(bits), 0});
  }
  return out;
}

std::vector<TrafficRecord> load_trace(const std::string& path, std::size_t node_count) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path);
  return parse_trace(in, node_count);
}

}  // namespace learn
