#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "learn/common.hpp"
#include "learn/packet.hpp"

namespace learn {

struct Coord {
  int x = 0;
  int y = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

enum class NodeRole : std::uint8_t { Untrusted, TrustedCore, MemoryController };

/// W x H mesh with row-major ids (id = y*W + x) and bidirectional links.
class Topology {
 public:
  /// Throws ConfigError on non-positive dimensions, fewer than 2 nodes, or role counts that do not fit.
  Topology(int width, int height, std::uint64_t seed, int trusted_cores = 16, int memory_controllers = 8);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

  Coord coord(NodeId id) const noexcept { return {static_cast<int>(id) % width_, static_cast<int>(id) / width_}; }
  NodeId id(Coord c) const noexcept { return static_cast<NodeId>(c.y * width_ + c.x); }

  /// Neighbour through `p`, or nullopt at the mesh edge (and for Local).
  std::optional<NodeId> neighbor(NodeId n, Port p) const noexcept;

  /// Undirected links, each listed once with the lower id first.
  const std::vector<std::pair<NodeId, NodeId>>& links() const noexcept { return links_; }

  NodeRole role(NodeId n) const noexcept { return roles_[n]; }
  std::vector<NodeId> nodes_with_role(NodeRole r) const;

  /// Link hops on the X-Y path.
  int hops(NodeId a, NodeId b) const noexcept;
  /// Routers visited from a to b under X-Y routing, excluding a, including b.
  std::vector<NodeId> xy_path(NodeId a, NodeId b) const;

 private:
  int width_;
  int height_;
  std::vector<std::pair<NodeId, NodeId>> links_;
  std::vector<NodeRole> roles_;
};

/// Dimension-ordered routing: X first, then Y. Local when cur == dst.
Port xy_route(Coord cur, Coord dst) noexcept;

}  // namespace learn
