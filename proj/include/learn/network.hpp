#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "learn/packet.hpp"
#include "learn/sim_clock.hpp"
#include "learn/topology.hpp"

namespace learn {

enum class VcClass : std::uint8_t { Data, Control };

struct NetworkParams {
  int data_vcs = 4;
  int data_depth = 4;
  int control_vcs = 2;
  int control_depth = 1;
  std::uint32_t flit_bits = 128;
};

/// ceil(bits / flit_bits), minimum 1.
std::uint32_t flits_for(std::uint64_t bits, std::uint32_t flit_bits) noexcept;

/// What the network moves. The owner keeps the payload and maps it by id.
struct SimPacket {
  std::uint64_t id = 0;
  std::uint32_t flits = 1;
  VcClass vc_class = VcClass::Data;
  NodeId source = 0;
  /// Packets with the same nonzero key leave every router in arrival order.
  std::uint64_t flow_key = 0;
  /// Earliest cycle the NI may start injecting.
  Cycle ready = 0;
};

struct HeadDecision {
  enum class Kind { Forward, Eject, Wait, Drop };

  Kind kind = Kind::Wait;
  Port port = Port::Local;
  /// Extra cycles the head spends in RC+VA+SA.
  std::uint32_t stall = 0;

  static HeadDecision forward(Port p, std::uint32_t stall = 0) { return {Kind::Forward, p, stall}; }
  static HeadDecision eject(std::uint32_t stall = 0) { return {Kind::Eject, Port::Local, stall}; }
  static HeadDecision wait() { return {Kind::Wait, Port::Local, 0}; }
  static HeadDecision drop() { return {Kind::Drop, Port::Local, 0}; }
};

/// Callbacks into the scheme layer. on_head runs once per router per packet
/// (repeated while it answers Wait), when the head reaches route compute.
class NetworkHooks {
 public:
  virtual ~NetworkHooks() = default;
  virtual HeadDecision on_head(NodeId router, Port in_port, SimPacket& pkt, Cycle now) = 0;
  virtual void on_delivered(NodeId node, const SimPacket& pkt, Cycle now) = 0;
  virtual void on_dropped(NodeId router, const SimPacket& pkt, Cycle now) = 0;
};

enum class Stage : std::uint8_t { BW, RC, SA, LT, EJ };
std::string_view to_string(Stage s) noexcept;

struct TraceEvent {
  Cycle cycle = 0;
  NodeId router = 0;
  Stage stage = Stage::BW;
  std::uint64_t packet_id = 0;
  std::uint32_t flit_seq = 0;
};

/// "cycle router stage packet_id flit_seq"
std::string format_trace(const TraceEvent& e);

struct StuckVc {
  NodeId router = 0;
  Port port = Port::Local;
  int vc = 0;
  std::uint64_t packet_id = 0;
  std::uint32_t front_seq = 0;
  std::size_t occupancy = 0;
  bool routed = false;
};

struct StallReport {
  Cycle cycle = 0;
  std::size_t packets_in_flight = 0;
  std::size_t packets_waiting_at_ni = 0;
  std::vector<StuckVc> stuck;

  std::string describe() const;
};

/// Mesh of 3-stage wormhole routers with per-class VCs and credit flow control.
/// A head written at cycle a computes its route at a+1, may win the switch at
/// a+1+stall, crosses the link in the next cycle and is written downstream two
/// cycles after switch allocation. Ejected flits reach the NI two cycles after
/// switch allocation. The NI injects at most one flit per cycle.
class Network {
 public:
  Network(const Topology& topo, NetworkParams params, NetworkHooks& hooks);

  /// Queues a packet at its source NI. Throws SimulationError on zero flits or a reused id.
  void inject(const SimPacket& pkt);
  void step();

  Cycle now() const noexcept { return now_; }
  std::size_t in_flight() const noexcept { return live_.size(); }
  bool idle() const noexcept { return live_.empty(); }
  const NetworkParams& params() const noexcept { return params_; }
  const Topology& topology() const noexcept { return topo_; }

  void set_trace(std::function<void(const TraceEvent&)> sink) { trace_ = std::move(sink); }
  StallReport stall_report() const;

  /// Largest buffer occupancy seen on any VC, for credit-safety checks.
  std::size_t max_vc_occupancy(VcClass c) const noexcept { return c == VcClass::Data ? max_data_occ_ : max_ctrl_occ_; }
  std::uint64_t flits_delivered() const noexcept { return flits_delivered_; }

 private:
  struct Flit {
    std::uint64_t pkt = 0;
    std::uint32_t seq = 0;
    bool head = false;
    bool tail = false;
    Cycle ready = 0;
  };

  struct InputVc {
    std::deque<Flit> buf;
    std::uint64_t pkt = 0;
    std::uint64_t gate_key = 0;
    bool decided = false;
    bool drop = false;
    Port out_port = Port::Local;
    int out_vc = -1;
    Cycle eligible_at = 0;
  };

  struct OutVc {
    bool busy = false;
    bool tail_sent = false;
    int credits = 0;
  };

  struct Router {
    std::array<std::vector<InputVc>, kPortCount> in;
    std::array<std::vector<OutVc>, kPortCount> out;
    std::array<int, kPortCount> in_rr{};
    std::array<int, kPortCount> out_rr{};
    std::array<int, kPortCount> va_rr{};
    std::unordered_map<std::uint64_t, std::deque<std::uint64_t>> flow_gate;
    std::size_t flits = 0;
  };

  struct Ni {
    std::array<std::deque<std::uint64_t>, 2> queue;
    struct Active {
      bool on = false;
      std::uint64_t pkt = 0;
      std::uint32_t next_seq = 0;
      int vc = -1;
    };
    std::array<Active, 2> active;
    std::vector<OutVc> local;
    int rr = 0;
  };

  enum class EventKind : std::uint8_t { Arrive, Credit, Eject };
  struct Event {
    EventKind kind;
    NodeId router;
    Port port;
    int vc;
    Flit flit;
    /// Eject: the packet is being dropped. Credit: the credit belongs to the NI.
    bool drop;
  };

  int vc_count() const noexcept { return params_.data_vcs + params_.control_vcs; }
  int depth(int vc) const noexcept { return vc < params_.data_vcs ? params_.data_depth : params_.control_depth; }
  VcClass class_of(int vc) const noexcept { return vc < params_.data_vcs ? VcClass::Data : VcClass::Control; }
  int first_vc(VcClass c) const noexcept { return c == VcClass::Data ? 0 : params_.data_vcs; }
  int vcs_of(VcClass c) const noexcept { return c == VcClass::Data ? params_.data_vcs : params_.control_vcs; }

  void emit(Cycle c, NodeId r, Stage s, std::uint64_t pkt, std::uint32_t seq) const;
  void schedule(Cycle at, Event e);
  void process_events();
  void write_flit(NodeId r, Port p, int vc, Flit f);
  void inject_flits();
  void route_heads(NodeId r);
  void allocate(NodeId r);
  int free_out_vc(Router& rt, Port op, VcClass c);
  void release_if_done(OutVc& o, int vc) const noexcept;
  void finish(std::uint64_t pkt, NodeId where, bool dropped);

  const Topology& topo_;
  NetworkParams params_;
  NetworkHooks& hooks_;
  Cycle now_ = 0;

  std::vector<Router> routers_;
  std::vector<Ni> nis_;
  std::unordered_map<std::uint64_t, SimPacket> live_;
  Agenda<std::uint64_t> pending_;
  std::array<std::vector<Event>, 4> ring_;
  std::function<void(const TraceEvent&)> trace_;
  std::size_t max_data_occ_ = 0;
  std::size_t max_ctrl_occ_ = 0;
  std::uint64_t flits_delivered_ = 0;
};

}  // namespace learn
