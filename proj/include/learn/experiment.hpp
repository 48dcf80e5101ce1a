#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "learn/baseline.hpp"
#include "learn/config.hpp"
#include "learn/metrics.hpp"
#include "learn/network.hpp"
#include "learn/protocol.hpp"
#include "learn/topology.hpp"
#include "learn/traffic.hpp"

namespace learn {

/// Observation points for tests and tools. All optional.
struct RunTaps {
  /// Every protocol packet as it is put on a link, including DTs after each rewrite.
  std::function<void(NodeId at, const Packet& pkt)> on_wire;
  std::function<void(const TraceEvent&)> on_trace;
  /// First block of a DT before and after a router's accumulate step.
  std::function<void(NodeId router, std::uint64_t session, FieldElement in, FieldElement out)> on_dt_hop;
  /// Payload recovered at the destination for a traffic record.
  std::function<void(std::size_t traffic_index, const Bytes& payload)> on_payload;
};

struct SessionRecord {
  enum class State { Pending, Established, Failed, Closed };

  std::uint64_t serial = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t conversation = 0;
  PublicId id;
  State state = State::Pending;
  std::uint64_t ri = 0;
  std::uint64_t ra = 0;
  std::uint64_t rc = 0;
  std::uint64_t dt_sent = 0;
  std::uint64_t dt_delivered = 0;
  std::uint64_t dt_dropped = 0;
  bool closing = false;
  /// DTs admitted before the session was established, oldest first.
  std::deque<std::size_t> waiting;
  /// Routers that completed a routing row, with the row's incoming VCN.
  std::vector<std::pair<NodeId, std::uint64_t>> path;
};

/// Payload bytes for traffic record `index`, a pure function of (seed, index).
Bytes traffic_payload(std::uint64_t seed, std::size_t index, std::uint32_t size_bits);

/// Synthetic stream or trace replay, as the configuration asks.
std::vector<TrafficRecord> build_traffic(const RunConfig& cfg, const Topology& topo);

/// One simulation: topology, network, per-node scheme state, and the driver loop.
class Experiment final : private NetworkHooks {
 public:
  explicit Experiment(RunConfig cfg);
  Experiment(RunConfig cfg, std::vector<TrafficRecord> traffic);
  ~Experiment() override;

  RunTaps& taps() noexcept { return taps_; }
  MetricsReport run();

  const RunConfig& config() const noexcept { return cfg_; }
  const Topology& topology() const noexcept { return *topo_; }
  const std::vector<TrafficRecord>& traffic() const noexcept { return traffic_; }
  const LearnNode& node(NodeId n) const { return *nodes_.at(n); }
  std::uint64_t node_token(NodeId n) const { return tokens_.at(n); }
  const PublicId& node_public_id(NodeId n) const { return globals_.at(n).public_id; }
  const std::vector<SessionRecord>& sessions() const noexcept { return sessions_; }
  std::optional<StallReport> stall() const { return stall_; }
  std::size_t logical_in_flight() const noexcept;

 private:
  struct Logical {
    PacketKind kind = PacketKind::BaselineData;
    Cycle created = 0;
    /// When the packet reached its source NI. Later than `created` for DTs that waited on a handshake.
    Cycle handed = 0;
    std::optional<std::size_t> traffic;
    std::optional<std::size_t> session;
    int live_copies = 0;
    bool finished = false;
  };

  struct Segment {
    std::size_t logical = 0;
    Packet packet;
    NodeId emitter = 0;
    Port emit_port = Port::Local;
    std::optional<NodeId> hint;
    NodeId dst = 0;
    bool crypto = false;
    std::uint64_t circuit = 0;
    std::string drop_cause;
    std::optional<Bytes> recovered;
  };

  HeadDecision on_head(NodeId router, Port in_port, SimPacket& pkt, Cycle now) override;
  void on_delivered(NodeId node, const SimPacket& pkt, Cycle now) override;
  void on_dropped(NodeId router, const SimPacket& pkt, Cycle now) override;

  void setup();
  void admit(std::size_t traffic_index, Cycle now);
  void admit_baseline(std::size_t traffic_index, Cycle now);
  void admit_learn(std::size_t traffic_index, Cycle now);
  void send_dt(std::size_t session, std::size_t logical, Cycle now);
  std::size_t open_session(NodeId src, NodeId dst, std::uint32_t conversation, Cycle now);
  void fail_session(std::size_t session);
  void maybe_close(std::size_t session);

  Cycle reserve_engine(NodeId n, Cycle now, std::uint64_t work);
  std::size_t new_logical(PacketKind kind, Cycle created, std::optional<std::size_t> traffic,
                          std::optional<std::size_t> session);
  void emit_segment(std::size_t logical, Packet pkt, NodeId from, Port port, Cycle ready, VcClass cls,
                    std::uint32_t flits, std::uint64_t flow_key, Segment extra);
  void deliver_logical(std::size_t logical, Cycle now);
  void drop_logical(std::size_t logical, const std::string& cause);
  void handle_handshake(NodeId n, Segment seg, Cycle now);

  const SymKey& e2e_key(NodeId src, NodeId dst);
  const OnionCircuit& circuit(NodeId src, NodeId dst);
  CryptoEngine& engine_of(NodeId n);
  std::uint32_t dt_cost() const noexcept;

  RunConfig cfg_;
  std::unique_ptr<Topology> topo_;
  std::unique_ptr<Network> net_;
  std::vector<TrafficRecord> traffic_;
  RunTaps taps_;

  std::vector<std::uint64_t> tokens_;
  std::vector<KeyPair> globals_;
  std::vector<std::unique_ptr<LearnNode>> nodes_;
  std::vector<std::unique_ptr<CryptoEngine>> engines_;
  std::vector<Cycle> engine_free_;
  Rng provision_rng_;

  std::map<std::pair<NodeId, NodeId>, SymKey> e2e_keys_;
  std::map<std::pair<NodeId, NodeId>, OnionCircuit> circuits_;
  std::vector<std::unordered_map<std::uint64_t, SymKey>> circuit_keys_;

  std::vector<SessionRecord> sessions_;
  std::map<std::tuple<NodeId, NodeId, std::uint32_t>, std::size_t> session_index_;
  std::unordered_map<NodeId, std::size_t> latest_session_;

  std::vector<Logical> logicals_;
  std::unordered_map<std::uint64_t, Segment> segments_;
  std::uint64_t next_packet_id_ = 1;
  std::size_t unfinished_ = 0;

  MetricsReport report_;
  std::optional<StallReport> stall_;
};

MetricsReport run_experiment(const RunConfig& cfg);

}  // namespace learn
