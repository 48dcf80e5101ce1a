#include "learn/experiment.hpp"

#include <algorithm>
#include <unordered_set>

namespace learn {

namespace {

std::size_t payload_bytes(std::uint32_t size_bits) { return std::max<std::size_t>(1, (size_bits + 7) / 8); }

constexpr Port kMeshPorts[] = {Port::East, Port::West, Port::North, Port::South};

}  // namespace

Bytes traffic_payload(std::uint64_t seed, std::size_t index, std::uint32_t size_bits) {
  Rng rng(derive_seed(seed, 0x7061796cULL, index));
  Bytes out(payload_bytes(size_bits));
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

std::vector<TrafficRecord> build_traffic(const RunConfig& cfg, const Topology& topo) {
  if (!cfg.trace.empty()) return load_trace(cfg.trace, topo.node_count());
  TrafficParams tp;
  tp.pattern = cfg.pattern;
  tp.rate = cfg.rate;
  tp.horizon = cfg.cycles;
  tp.seed = cfg.seed;
  tp.data_fraction = cfg.data_fraction;
  tp.control_bits = cfg.control_bits;
  tp.data_bits = cfg.data_bits;
  tp.session_length = cfg.session_length;
  tp.tornado = cfg.tornado;
  if (cfg.injectors == Injectors::Trusted) tp.injectors = topo.nodes_with_role(NodeRole::TrustedCore);
  return generate(tp, topo.width(), topo.height());
}

Experiment::Experiment(RunConfig cfg) : cfg_(std::move(cfg)) {
  setup();
  traffic_ = build_traffic(cfg_, *topo_);
}

Experiment::Experiment(RunConfig cfg, std::vector<TrafficRecord> traffic)
    : cfg_(std::move(cfg)), traffic_(std::move(traffic)) {
  setup();
  for (const TrafficRecord& r : traffic_) {
    if (r.src >= topo_->node_count() || r.dst >= topo_->node_count() || r.src == r.dst) {
      throw ConfigError("traffic record with an invalid source or destination");
    }
  }
}

Experiment::~Experiment() = default;

void Experiment::setup() {
  cfg_.validate();
  const int w = cfg_.width;
  const int h = cfg_.height;
  const int n = w * h;
  // Small meshes cannot hold the default role counts.
  const int boundary = (w == 1 || h == 1) ? n : 2 * (w + h) - 4;
  const int mcs = std::clamp(cfg_.memory_controllers, 0, boundary);
  const int trusted = std::clamp(cfg_.trusted_cores, 0, n - mcs);
  topo_ = std::make_unique<Topology>(w, h, cfg_.seed, trusted, mcs);

  NetworkParams np;
  np.data_vcs = cfg_.data_vcs;
  np.data_depth = cfg_.data_vc_depth;
  np.control_vcs = cfg_.control_vcs;
  np.control_depth = cfg_.control_vc_depth;
  np.flit_bits = cfg_.flit_bits;
  net_ = std::make_unique<Network>(*topo_, np, static_cast<NetworkHooks&>(*this));

  provision_rng_.seed(derive_seed(cfg_.seed, 0x70726f76ULL));
  std::unordered_set<std::uint64_t> seen;
  while (tokens_.size() < static_cast<std::size_t>(n)) {
    std::uint64_t t = provision_rng_();
    if (t != 0 && seen.insert(t).second) tokens_.push_back(t);
  }

  const CostModel costs{cfg_.enc_cycles, cfg_.dec_cycles, cfg_.polygen_cycles};
  CryptoEngine provisioning(costs, derive_seed(cfg_.seed, 0x676c6f62ULL));
  for (int i = 0; i < n; ++i) globals_.push_back(provisioning.keypair_gen(false));

  if (is_learn(cfg_.scheme)) {
    LearnParams lp;
    lp.costs = costs;
    lp.table_capacity = cfg_.table_capacity;
    lp.pad_destination = cfg_.effective_pad_m();
    lp.pad_intermediate = cfg_.pad_intermediate;
    lp.evolve = cfg_.effective_evolve();
    for (int i = 0; i < n; ++i) {
      nodes_.push_back(std::make_unique<LearnNode>(PrimeField::mersenne61(), lp, globals_[i],
                                                   derive_seed(cfg_.seed, 0x6e6f6465ULL, i)));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      engines_.push_back(std::make_unique<CryptoEngine>(costs, derive_seed(cfg_.seed, 0x656e67ULL, i)));
    }
  }
  engine_free_.assign(static_cast<std::size_t>(n), 0);
  circuit_keys_.resize(static_cast<std::size_t>(n));
}

CryptoEngine& Experiment::engine_of(NodeId n) {
  return is_learn(cfg_.scheme) ? nodes_[n]->engine() : *engines_[n];
}

std::uint32_t Experiment::dt_cost() const noexcept {
  return cfg_.dt_hop_cycles + (cfg_.effective_evolve() ? cfg_.evolve_cycles : 0);
}

const SymKey& Experiment::e2e_key(NodeId src, NodeId dst) {
  auto key = std::minmax(src, dst);
  auto it = e2e_keys_.find(key);
  if (it == e2e_keys_.end()) {
    SymKey k;
    k.key = {provision_rng_(), provision_rng_()};
    it = e2e_keys_.emplace(key, k).first;
  }
  return it->second;
}

const OnionCircuit& Experiment::circuit(NodeId src, NodeId dst) {
  auto it = circuits_.find({src, dst});
  if (it != circuits_.end()) return it->second;
  OnionCircuit c;
  do {
    c.circuit_id = provision_rng_();
  } while (c.circuit_id == 0 || circuit_keys_[topo_->xy_path(src, dst).front()].contains(c.circuit_id));
  for (NodeId hop : topo_->xy_path(src, dst)) {
    SymKey k;
    k.key = {provision_rng_(), provision_rng_()};
    c.hop_tokens.push_back(tokens_[hop]);
    c.hop_keys.push_back(k);
    circuit_keys_[hop][c.circuit_id] = k;
  }
  return circuits_.emplace(std::make_pair(src, dst), std::move(c)).first->second;
}

Cycle Experiment::reserve_engine(NodeId n, Cycle now, std::uint64_t work) {
  if (work == 0) return now;
  Cycle start = std::max(now, engine_free_[n]);
  engine_free_[n] = start + work;
  return engine_free_[n];
}

std::size_t Experiment::new_logical(PacketKind kind, Cycle created, std::optional<std::size_t> traffic,
                                   std::optional<std::size_t> session) {
  Logical l;
  l.kind = kind;
  l.created = created;
  l.handed = created;
  l.traffic = traffic;
  l.session = session;
  logicals_.push_back(l);
  ++unfinished_;
  return logicals_.size() - 1;
}

void Experiment::emit_segment(std::size_t logical, Packet pkt, NodeId from, Port port, Cycle ready, VcClass cls,
                              std::uint32_t flits, std::uint64_t flow_key, Segment extra) {
  extra.logical = logical;
  extra.packet = std::move(pkt);
  extra.emitter = from;
  extra.emit_port = port;
  ++logicals_[logical].live_copies;
  if (taps_.on_wire) taps_.on_wire(from, extra.packet);

  SimPacket sp;
  sp.id = next_packet_id_++;
  sp.flits = flits;
  sp.vc_class = cls;
  sp.source = from;
  sp.flow_key = flow_key;
  sp.ready = ready;
  segments_.emplace(sp.id, std::move(extra));
  net_->inject(sp);
}

void Experiment::deliver_logical(std::size_t logical, Cycle now) {
  Logical& l = logicals_[logical];
  if (l.finished) return;
  l.finished = true;
  --unfinished_;
  const std::uint64_t latency = now - l.handed;
  ++report_.delivered;
  report_.total_noc_delay += latency;
  report_.max_latency = std::max(report_.max_latency, latency);
  switch (l.kind) {
    case PacketKind::RI: ++report_.ri; break;
    case PacketKind::RA: ++report_.ra; break;
    case PacketKind::RC: ++report_.rc; break;
    case PacketKind::DT: ++report_.dt; break;
    case PacketKind::BaselineData: ++report_.baseline; break;
  }
}

void Experiment::drop_logical(std::size_t logical, const std::string& cause) {
  Logical& l = logicals_[logical];
  if (l.finished) return;
  l.finished = true;
  --unfinished_;
  ++report_.drops_by_cause[cause];
}

std::size_t Experiment::logical_in_flight() const noexcept {
  std::size_t n = 0;
  for (const Logical& l : logicals_) n += l.finished ? 0 : 1;
  return n;
}

void Experiment::admit(std::size_t traffic_index, Cycle now) {
  if (is_learn(cfg_.scheme)) {
    admit_learn(traffic_index, now);
  } else {
    admit_baseline(traffic_index, now);
  }
}

void Experiment::admit_baseline(std::size_t traffic_index, Cycle now) {
  const TrafficRecord& tr = traffic_[traffic_index];
  std::size_t lg = new_logical(PacketKind::BaselineData, now, traffic_index, std::nullopt);
  Bytes payload = traffic_payload(cfg_.seed, traffic_index, tr.size_bits);

  const bool crypto = cfg_.scheme != Scheme::None && (cfg_.crypto_on_control || tr.size_bits > cfg_.control_bits);
  const Scheme form = crypto ? cfg_.scheme : Scheme::None;
  BaselineKeys keys;
  Segment extra;
  if (form == Scheme::EncOnly) keys.end_to_end = &e2e_key(tr.src, tr.dst);
  if (form == Scheme::Onion) {
    keys.circuit = &circuit(tr.src, tr.dst);
    extra.circuit = keys.circuit->circuit_id;
  }
  CryptoEngine& eng = *engines_[tr.src];
  const std::uint64_t before = eng.cycles_charged();
  Packet pkt = wrap_for_send(form, eng, tokens_[tr.src], tokens_[tr.dst], keys, payload);
  Cycle ready = reserve_engine(tr.src, now, eng.cycles_charged() - before);

  extra.dst = tr.dst;
  extra.crypto = crypto;
  const std::uint64_t flow = derive_seed(0x666c6f77ULL, tr.src, tr.dst) | 1;
  emit_segment(lg, std::move(pkt), tr.src, Port::Local, ready, VcClass::Data,
               flits_for(tr.size_bits, cfg_.flit_bits), flow, std::move(extra));
}

std::size_t Experiment::open_session(NodeId src, NodeId dst, std::uint32_t conversation, Cycle now) {
  if (auto prev = latest_session_.find(src); prev != latest_session_.end()) {
    sessions_[prev->second].closing = true;
    maybe_close(prev->second);
  }

  const std::size_t idx = sessions_.size();
  SessionRecord rec;
  rec.serial = idx;
  rec.src = src;
  rec.dst = dst;
  rec.conversation = conversation;

  LearnNode& node = *nodes_[src];
  const std::uint64_t before = node.engine().cycles_charged();
  LearnNode::Initiated init = node.initiate_session(globals_[dst].public_id);
  rec.id = init.session;
  sessions_.push_back(std::move(rec));
  session_index_[{src, dst, conversation}] = idx;
  latest_session_[src] = idx;

  Cycle ready = reserve_engine(src, now, node.engine().cycles_charged() - before);
  std::size_t lg = new_logical(PacketKind::RI, now, std::nullopt, idx);
  const std::uint32_t flits = flits_for(init.ri.wire_bits(), cfg_.flit_bits);
  if (cfg_.ri_mode == RiMode::XY) {
    Segment extra;
    extra.hint = dst;
    emit_segment(lg, init.ri, src, xy_route(topo_->coord(src), topo_->coord(dst)), ready, VcClass::Control, flits, 0,
                 std::move(extra));
  } else {
    for (Port p : kMeshPorts) {
      if (topo_->neighbor(src, p)) emit_segment(lg, init.ri, src, p, ready, VcClass::Control, flits, 0, Segment{});
    }
  }
  return idx;
}

void Experiment::admit_learn(std::size_t traffic_index, Cycle now) {
  const TrafficRecord& tr = traffic_[traffic_index];
  std::size_t s;
  if (auto it = session_index_.find({tr.src, tr.dst, tr.conversation}); it != session_index_.end()) {
    s = it->second;
  } else {
    s = open_session(tr.src, tr.dst, tr.conversation, now);
  }
  std::size_t lg = new_logical(PacketKind::DT, now, traffic_index, s);
  switch (sessions_[s].state) {
    case SessionRecord::State::Pending: sessions_[s].waiting.push_back(lg); break;
    case SessionRecord::State::Established: send_dt(s, lg, now); break;
    case SessionRecord::State::Failed: drop_logical(lg, "session_failed"); break;
    case SessionRecord::State::Closed: drop_logical(lg, "session_closed"); break;
  }
}

void Experiment::send_dt(std::size_t session, std::size_t logical, Cycle now) {
  SessionRecord& rec = sessions_[session];
  const std::size_t ti = *logicals_[logical].traffic;
  const TrafficRecord& tr = traffic_[ti];
  LearnNode& node = *nodes_[rec.src];
  Bytes payload = traffic_payload(cfg_.seed, ti, tr.size_bits);

  Packet pkt;
  try {
    pkt = node.send_dt(rec.id, payload);
  } catch (const EvolutionCollisionError&) {
    drop_logical(logical, "evolution_collision");
    fail_session(session);
    return;
  }
  ++rec.dt_sent;
  Logical& l = logicals_[logical];
  l.handed = now;
  report_.session_wait_cycles += now - l.created;
  Cycle ready = reserve_engine(rec.src, now, dt_cost());
  Segment extra;
  extra.dst = rec.dst;
  const std::uint64_t flow = pkt.vcn;
  emit_segment(logical, std::move(pkt), rec.src, node.session(rec.id)->first_port, ready, VcClass::Data,
               flits_for(tr.size_bits, cfg_.flit_bits), flow, std::move(extra));
}

void Experiment::fail_session(std::size_t session) {
  SessionRecord& rec = sessions_[session];
  if (rec.state == SessionRecord::State::Failed || rec.state == SessionRecord::State::Closed) return;
  rec.state = SessionRecord::State::Failed;
  ++report_.sessions_failed;
  nodes_[rec.src]->abort_session(rec.id);
  for (std::size_t lg : rec.waiting) drop_logical(lg, "session_failed");
  rec.waiting.clear();
}

void Experiment::maybe_close(std::size_t session) {
  SessionRecord& rec = sessions_[session];
  if (!rec.closing || rec.state != SessionRecord::State::Established) return;
  if (!rec.waiting.empty() || rec.rc == 0 || rec.dt_delivered + rec.dt_dropped < rec.dt_sent) return;
  nodes_[rec.src]->close_session(rec.id);
  for (const auto& [router, vcn] : rec.path) nodes_[router]->teardown(vcn);
  rec.state = SessionRecord::State::Closed;
}

HeadDecision Experiment::on_head(NodeId router, Port, SimPacket& pkt, Cycle) {
  Segment& seg = segments_.at(pkt.id);
  switch (seg.packet.kind) {
    case PacketKind::RI:
    case PacketKind::RA:
    case PacketKind::RC:
      return router == seg.emitter ? HeadDecision::forward(seg.emit_port) : HeadDecision::eject();

    case PacketKind::DT: {
      if (router == seg.emitter) return HeadDecision::forward(seg.emit_port);
      FieldElement in{};
      if (taps_.on_dt_hop) in = DtBody::decode(seg.packet.body).partials.front();
      DtResult res = nodes_[router]->forward_dt(seg.packet);
      const std::size_t s = *logicals_[seg.logical].session;
      switch (res.outcome) {
        case DtOutcome::Forward:
          if (taps_.on_dt_hop) taps_.on_dt_hop(router, s, in, DtBody::decode(seg.packet.body).partials.front());
          if (taps_.on_wire) taps_.on_wire(router, seg.packet);
          pkt.flow_key = seg.packet.vcn;
          return HeadDecision::forward(res.port, dt_cost());
        case DtOutcome::Deliver: {
          if (taps_.on_dt_hop) taps_.on_dt_hop(router, s, in, res.blocks.front());
          const TrafficRecord& tr = traffic_[*logicals_[seg.logical].traffic];
          try {
            Bytes payload = unpack_blocks(res.blocks, payload_bytes(tr.size_bits));
            if (checksum32(payload) == res.checksum) seg.recovered = std::move(payload);
          } catch (const ParseError&) {
          }
          return HeadDecision::eject(dt_cost());
        }
        case DtOutcome::Wait: return HeadDecision::wait();
        case DtOutcome::Unknown: seg.drop_cause = "dt_unknown_vcn"; return HeadDecision::drop();
        case DtOutcome::Collision:
          seg.drop_cause = "evolution_collision";
          fail_session(s);
          return HeadDecision::drop();
      }
      return HeadDecision::drop();
    }

    case PacketKind::BaselineData: {
      const Scheme form = seg.crypto ? cfg_.scheme : Scheme::None;
      CryptoEngine& eng = *engines_[router];
      const std::uint64_t before = eng.cycles_charged();
      auto stall = [&] { return static_cast<std::uint32_t>(eng.cycles_charged() - before); };
      if (router == seg.dst) {
        const SymKey* key = nullptr;
        if (form == Scheme::EncOnly) key = &e2e_key(seg.emitter, seg.dst);
        if (form == Scheme::Onion) {
          auto it = circuit_keys_[router].find(seg.circuit);
          if (it != circuit_keys_[router].end()) key = &it->second;
        }
        seg.recovered = unwrap_at_dest(form, eng, key, seg.packet);
        if (!seg.recovered) {
          seg.drop_cause = "integrity";
          return HeadDecision::drop();
        }
        return HeadDecision::eject(stall());
      }
      const Port out = xy_route(topo_->coord(router), topo_->coord(seg.dst));
      if (router == seg.emitter || form != Scheme::Onion) return HeadDecision::forward(out);
      auto it = circuit_keys_[router].find(seg.circuit);
      HopResult hop = hop_process(form, eng, it == circuit_keys_[router].end() ? nullptr : &it->second, seg.packet);
      if (!hop.ok) {
        seg.drop_cause = "onion_peel_failed";
        return HeadDecision::drop();
      }
      if (taps_.on_wire) taps_.on_wire(router, seg.packet);
      return HeadDecision::forward(out, stall());
    }
  }
  return HeadDecision::drop();
}

void Experiment::on_delivered(NodeId node, const SimPacket& pkt, Cycle now) {
  auto it = segments_.find(pkt.id);
  Segment seg = std::move(it->second);
  segments_.erase(it);

  switch (seg.packet.kind) {
    case PacketKind::BaselineData:
    case PacketKind::DT: {
      const std::size_t ti = *logicals_[seg.logical].traffic;
      --logicals_[seg.logical].live_copies;
      const bool ok = seg.recovered && *seg.recovered == traffic_payload(cfg_.seed, ti, traffic_[ti].size_bits);
      if (ok) {
        deliver_logical(seg.logical, now);
        if (taps_.on_payload) taps_.on_payload(ti, *seg.recovered);
      } else {
        drop_logical(seg.logical, "integrity");
      }
      if (seg.packet.kind == PacketKind::DT) {
        const std::size_t s = *logicals_[seg.logical].session;
        if (ok) {
          ++sessions_[s].dt_delivered;
        } else {
          ++sessions_[s].dt_dropped;
        }
        maybe_close(s);
      }
      return;
    }
    case PacketKind::RI:
    case PacketKind::RA:
    case PacketKind::RC: handle_handshake(node, std::move(seg), now); return;
  }
}

void Experiment::handle_handshake(NodeId n, Segment seg, Cycle now) {
  const std::size_t lg = seg.logical;
  Logical& l = logicals_[lg];
  --l.live_copies;
  const std::size_t s = *l.session;
  LearnNode& node = *nodes_[n];
  const std::uint64_t before = node.engine().cycles_charged();
  const Port in_port = opposite(seg.emit_port);
  auto ready = [&] { return reserve_engine(n, now, node.engine().cycles_charged() - before); };
  auto flits = [&](const Packet& p) { return flits_for(p.wire_bits(), cfg_.flit_bits); };
  std::string cause;

  try {
    switch (seg.packet.kind) {
      case PacketKind::RI: {
        RiResult r = node.handle_ri(seg.packet, in_port);
        Cycle at = ready();
        switch (r.outcome) {
          case RiOutcome::Forward:
            if (cfg_.ri_mode == RiMode::XY) {
              Segment extra;
              extra.hint = seg.hint;
              emit_segment(lg, r.packet, n, xy_route(topo_->coord(n), topo_->coord(*seg.hint)), at, VcClass::Control,
                           flits(r.packet), 0, std::move(extra));
            } else {
              for (Port p : kMeshPorts) {
                if (p != in_port && topo_->neighbor(n, p)) {
                  emit_segment(lg, r.packet, n, p, at, VcClass::Control, flits(r.packet), 0, Segment{});
                }
              }
            }
            cause = "ri_lost";
            break;
          case RiOutcome::Accept: {
            deliver_logical(lg, now);
            ++sessions_[s].ri;
            std::size_t ra = new_logical(PacketKind::RA, now, std::nullopt, s);
            emit_segment(ra, r.packet, n, r.port, at, VcClass::Control, flits(r.packet), 0, Segment{});
            break;
          }
          case RiOutcome::Duplicate:
            ++report_.ri_duplicates;
            cause = "ri_lost";
            break;
          case RiOutcome::Tampered: cause = "ri_tampered"; break;
          case RiOutcome::TableFull: cause = "table_full"; break;
        }
        break;
      }
      case PacketKind::RA: {
        RaResult r = node.handle_ra(seg.packet, in_port);
        Cycle at = ready();
        switch (r.outcome) {
          case RaOutcome::Forward:
            emit_segment(lg, r.packet, n, r.port, at, VcClass::Control, flits(r.packet), 0, Segment{});
            break;
          case RaOutcome::Established: {
            deliver_logical(lg, now);
            SessionRecord& rec = sessions_[s];
            ++rec.ra;
            std::size_t rc = new_logical(PacketKind::RC, now, std::nullopt, s);
            emit_segment(rc, r.packet, n, r.port, at, VcClass::Control, flits(r.packet), 0, Segment{});
            rec.state = SessionRecord::State::Established;
            std::deque<std::size_t> waiting = std::move(rec.waiting);
            rec.waiting.clear();
            for (std::size_t dt : waiting) {
              if (sessions_[s].state != SessionRecord::State::Established) {
                drop_logical(dt, "session_failed");
                continue;
              }
              send_dt(s, dt, now);
            }
            break;
          }
          case RaOutcome::UnknownSession: cause = "ra_unknown_session"; break;
          case RaOutcome::Rejected: cause = "ra_rejected"; break;
          case RaOutcome::TableFull: cause = "table_full"; break;
        }
        break;
      }
      case PacketKind::RC: {
        RcResult r = node.handle_rc(seg.packet);
        Cycle at = ready();
        if (r.outcome != RcOutcome::Misrouted) sessions_[s].path.emplace_back(n, seg.packet.vcn);
        switch (r.outcome) {
          case RcOutcome::Forward:
            emit_segment(lg, r.packet, n, r.port, at, VcClass::Control, flits(r.packet), 0, Segment{});
            break;
          case RcOutcome::Terminal:
            deliver_logical(lg, now);
            ++sessions_[s].rc;
            ++report_.sessions_ok;
            maybe_close(s);
            break;
          case RcOutcome::Misrouted: cause = "rc_misrouted"; break;
        }
        break;
      }
      default: break;
    }
  } catch (const Error&) {
    cause = "protocol_error";
  }

  report_.keytable_rows_max = std::max<std::uint64_t>(report_.keytable_rows_max, node.key_rows());
  if (l.live_copies == 0 && !logicals_[lg].finished) {
    drop_logical(lg, cause.empty() ? "handshake_lost" : cause);
    fail_session(s);
  }
}

void Experiment::on_dropped(NodeId, const SimPacket& pkt, Cycle) {
  auto it = segments_.find(pkt.id);
  Segment seg = std::move(it->second);
  segments_.erase(it);
  Logical& l = logicals_[seg.logical];
  --l.live_copies;
  const std::string cause = seg.drop_cause.empty() ? "dropped" : seg.drop_cause;
  if (seg.packet.kind == PacketKind::DT) {
    const std::size_t s = *l.session;
    drop_logical(seg.logical, cause);
    ++sessions_[s].dt_dropped;
    maybe_close(s);
  } else if (seg.packet.kind == PacketKind::BaselineData) {
    drop_logical(seg.logical, cause);
  } else if (l.live_copies == 0 && !l.finished) {
    drop_logical(seg.logical, cause);
    fail_session(*l.session);
  }
}

MetricsReport Experiment::run() {
  report_ = MetricsReport{};
  report_.scheme = std::string(to_string(cfg_.scheme));
  report_.pattern = cfg_.trace.empty() ? std::string(to_string(cfg_.pattern)) : "trace";
  report_.seed = cfg_.seed;
  report_.width = cfg_.width;
  report_.height = cfg_.height;
  report_.config_echo = cfg_.echo();
  if (taps_.on_trace) net_->set_trace(taps_.on_trace);

  Cycle horizon = cfg_.cycles;
  if (!traffic_.empty()) horizon = std::max(horizon, traffic_.back().cycle + 1);
  std::size_t next = 0;
  while (net_->now() < horizon) {
    const Cycle t = net_->now();
    while (next < traffic_.size() && traffic_[next].cycle <= t) admit(next++, t);
    net_->step();
  }
  const Cycle cap = horizon + cfg_.drain_cap;
  while (!net_->idle() && net_->now() < cap) net_->step();

  report_.complete = net_->idle() && unfinished_ == 0;
  if (!report_.complete) stall_ = net_->stall_report();
  report_.cycles = net_->now();
  report_.injected = logicals_.size();
  report_.in_flight_at_end = unfinished_;
  report_.mean_latency =
      report_.delivered ? static_cast<double>(report_.total_noc_delay) / static_cast<double>(report_.delivered) : 0.0;

  const std::size_t n = topo_->node_count();
  report_.crypto_cycles_per_node.assign(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    report_.crypto_cycles_per_node[i] = engine_of(i).cycles_charged();
    report_.crypto_cycles += report_.crypto_cycles_per_node[i];
    if (is_learn(cfg_.scheme)) {
      report_.keytable_bytes_max = std::max<std::uint64_t>(report_.keytable_bytes_max, nodes_[i]->keytable_bytes_max());
    }
  }
  return report_;
}

MetricsReport run_experiment(const RunConfig& cfg) {
  Experiment e(cfg);
  return e.run();
}

}  // namespace learn
