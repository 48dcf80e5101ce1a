#include "learn/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace learn {

Port xy_route(Coord cur, Coord dst) noexcept {
  if (cur.x < dst.x) return Port::East;
  if (cur.x > dst.x) return Port::West;
  if (cur.y < dst.y) return Port::North;
  if (cur.y > dst.y) return Port::South;
  return Port::Local;
}

Topology::Topology(int width, int height, std::uint64_t seed, int trusted_cores, int memory_controllers)
    : width_(width), height_(height) {
  if (width < 1 || height < 1 || width * height < 2) {
    throw ConfigError("width/height: mesh must have positive dimensions and at least 2 nodes");
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      NodeId n = id({x, y});
      if (x + 1 < width) links_.emplace_back(n, id({x + 1, y}));
      if (y + 1 < height) links_.emplace_back(n, id({x, y + 1}));
    }
  }

  // Memory controllers sit on the boundary, spread evenly along its perimeter walk.
  std::vector<NodeId> boundary;
  for (int x = 0; x < width; ++x) boundary.push_back(id({x, 0}));
  for (int y = 1; y < height; ++y) boundary.push_back(id({width - 1, y}));
  if (height > 1) {
    for (int x = width - 2; x >= 0; --x) boundary.push_back(id({x, height - 1}));
  }
  if (width > 1) {
    for (int y = height - 2; y >= 1; --y) boundary.push_back(id({0, y}));
  }
  if (memory_controllers < 0 || static_cast<std::size_t>(memory_controllers) > boundary.size()) {
    throw ConfigError("memory_controllers: does not fit on the mesh boundary");
  }
  if (trusted_cores < 0 || static_cast<std::size_t>(trusted_cores + memory_controllers) > node_count()) {
    throw ConfigError("trusted_cores: more roles than nodes");
  }

  roles_.assign(node_count(), NodeRole::Untrusted);
  for (int i = 0; i < memory_controllers; ++i) {
    roles_[boundary[static_cast<std::size_t>(i) * boundary.size() / memory_controllers]] = NodeRole::MemoryController;
  }
  std::vector<NodeId> free;
  for (NodeId n = 0; n < node_count(); ++n) {
    if (roles_[n] == NodeRole::Untrusted) free.push_back(n);
  }
  Rng rng(derive_seed(seed, 0x726f6c6573ULL));
  for (int i = 0; i < trusted_cores; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), free.size() - 1);
    std::swap(free[static_cast<std::size_t>(i)], free[pick(rng)]);
    roles_[free[static_cast<std::size_t>(i)]] = NodeRole::TrustedCore;
  }
}

std::optional<NodeId> Topology::neighbor(NodeId n, Port p) const noexcept {
  Coord c = coord(n);
  switch (p) {
    case Port::East: ++c.x; break;
    case Port::West: --c.x; break;
    case Port::North: ++c.y; break;
    case Port::South: --c.y; break;
    case Port::Local: return std::nullopt;
  }
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) return std::nullopt;
  return id(c);
}

std::vector<NodeId> Topology::nodes_with_role(NodeRole r) const {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < node_count(); ++n) {
    if (roles_[n] == r) out.push_back(n);
  }
  return out;
}

int Topology::hops(NodeId a, NodeId b) const noexcept {
  Coord ca = coord(a);
  Coord cb = coord(b);
  return std::abs(ca.x - cb.x) + std::abs(ca.y - cb.y);
}

std::vector<NodeId> Topology::xy_path(NodeId a, NodeId b) const {
  std::vector<NodeId> path;
  NodeId cur = a;
  for (Port p = xy_route(coord(cur), coord(b)); p != Port::Local; p = xy_route(coord(cur), coord(b))) {
    cur = *neighbor(cur, p);
    path.push_back(cur);
  }
  return path;
}

}  // namespace learn
