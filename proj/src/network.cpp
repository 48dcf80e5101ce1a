#include "learn/network.hpp"

#include <sstream>

namespace learn {

std::uint32_t flits_for(std::uint64_t bits, std::uint32_t flit_bits) noexcept {
  std::uint64_t n = (bits + flit_bits - 1) / flit_bits;
  return static_cast<std::uint32_t>(n == 0 ? 1 : n);
}

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::BW: return "BW";
    case Stage::RC: return "RC";
    case Stage::SA: return "SA";
    case Stage::LT: return "LT";
    case Stage::EJ: return "EJ";
  }
  return "?";
}

std::string format_trace(const TraceEvent& e) {
  std::ostringstream os;
  os << e.cycle << ' ' << e.router << ' ' << to_string(e.stage) << ' ' << e.packet_id << ' ' << e.flit_seq;
  return os.str();
}

std::string StallReport::describe() const {
  std::ostringstream os;
  os << "stall at cycle " << cycle << ": " << packets_in_flight << " packets in flight, " << packets_waiting_at_ni
     << " waiting at NIs";
  for (const StuckVc& s : stuck) {
    os << "\n  router " << s.router << " port " << to_string(s.port) << " vc " << s.vc << " packet " << s.packet_id
       << " front flit " << s.front_seq << " occupancy " << s.occupancy << (s.routed ? " routed" : " unrouted");
  }
  return os.str();
}

Network::Network(const Topology& topo, NetworkParams params, NetworkHooks& hooks)
    : topo_(topo), params_(params), hooks_(hooks) {
  if (params_.data_vcs < 1 || params_.control_vcs < 1 || params_.data_depth < 1 || params_.control_depth < 1 ||
      params_.flit_bits == 0) {
    throw ConfigError("vc: every VC class needs at least one VC of depth >= 1");
  }
  routers_.resize(topo.node_count());
  for (Router& r : routers_) {
    for (int p = 0; p < kPortCount; ++p) {
      r.in[p].resize(static_cast<std::size_t>(vc_count()));
      r.out[p].resize(static_cast<std::size_t>(vc_count()));
      for (int v = 0; v < vc_count(); ++v) r.out[p][v].credits = depth(v);
    }
  }
  nis_.resize(topo.node_count());
  for (Ni& ni : nis_) {
    ni.local.resize(static_cast<std::size_t>(vc_count()));
    for (int v = 0; v < vc_count(); ++v) ni.local[v].credits = depth(v);
  }
}

void Network::emit(Cycle c, NodeId r, Stage s, std::uint64_t pkt, std::uint32_t seq) const {
  if (trace_) trace_({c, r, s, pkt, seq});
}

void Network::inject(const SimPacket& pkt) {
  if (pkt.flits == 0) throw SimulationError("packet " + std::to_string(pkt.id) + " has zero flits");
  if (pkt.source >= routers_.size()) throw SimulationError("packet source outside the mesh");
  if (!live_.emplace(pkt.id, pkt).second) throw SimulationError("packet id " + std::to_string(pkt.id) + " reused");
  pending_.schedule(std::max(pkt.ready, now_), pkt.id);
}

void Network::schedule(Cycle at, Event e) { ring_[at % ring_.size()].push_back(e); }

void Network::step() {
  process_events();
  inject_flits();
  for (NodeId r = 0; r < routers_.size(); ++r) {
    if (routers_[r].flits > 0) route_heads(r);
  }
  for (NodeId r = 0; r < routers_.size(); ++r) {
    if (routers_[r].flits > 0) allocate(r);
  }
  ++now_;
}

void Network::process_events() {
  auto& bucket = ring_[now_ % ring_.size()];
  // Hooks may inject, which never touches the ring, so iterating by index is safe.
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    Event e = bucket[i];
    switch (e.kind) {
      case EventKind::Arrive:
        write_flit(e.router, e.port, e.vc, e.flit);
        break;
      case EventKind::Credit: {
        OutVc& o = e.port == Port::Local && e.drop ? nis_[e.router].local[e.vc] : routers_[e.router].out[port_index(e.port)][e.vc];
        ++o.credits;
        release_if_done(o, e.vc);
        break;
      }
      case EventKind::Eject:
        emit(now_, e.router, Stage::EJ, e.flit.pkt, e.flit.seq);
        if (!e.drop) ++flits_delivered_;
        if (e.flit.tail) finish(e.flit.pkt, e.router, e.drop);
        break;
    }
  }
  bucket.clear();
}

void Network::write_flit(NodeId r, Port p, int vc, Flit f) {
  Router& rt = routers_[r];
  InputVc& iv = rt.in[port_index(p)][vc];
  f.ready = now_ + 1;
  if (f.head) {
    const SimPacket& sp = live_.at(f.pkt);
    iv.pkt = f.pkt;
    iv.decided = false;
    iv.drop = false;
    iv.out_vc = -1;
    iv.out_port = Port::Local;
    if (sp.flow_key != 0) rt.flow_gate[sp.flow_key].push_back(f.pkt);
    iv.gate_key = sp.flow_key;
  }
  iv.buf.push_back(f);
  ++rt.flits;
  std::size_t occ = iv.buf.size();
  if (occ > static_cast<std::size_t>(depth(vc))) {
    throw SimulationError("credit violation: router " + std::to_string(r) + " port " + std::string(to_string(p)) +
                          " vc " + std::to_string(vc) + " holds " + std::to_string(occ) + " flits");
  }
  std::size_t& mx = class_of(vc) == VcClass::Data ? max_data_occ_ : max_ctrl_occ_;
  mx = std::max(mx, occ);
  emit(now_, r, Stage::BW, f.pkt, f.seq);
}

void Network::inject_flits() {
  while (pending_.due(now_)) {
    std::uint64_t id = pending_.pop().second;
    const SimPacket& sp = live_.at(id);
    nis_[sp.source].queue[sp.vc_class == VcClass::Data ? 0 : 1].push_back(id);
  }

  for (NodeId n = 0; n < nis_.size(); ++n) {
    Ni& ni = nis_[n];
    for (int c = 0; c < 2; ++c) {
      auto& act = ni.active[c];
      if (act.on || ni.queue[c].empty()) continue;
      VcClass cls = c == 0 ? VcClass::Data : VcClass::Control;
      for (int k = 0; k < vcs_of(cls); ++k) {
        int v = first_vc(cls) + k;
        if (!ni.local[v].busy) {
          act = {true, ni.queue[c].front(), 0, v};
          ni.queue[c].pop_front();
          ni.local[v].busy = true;
          ni.local[v].tail_sent = false;
          break;
        }
      }
    }
    int pick = -1;
    for (int k = 0; k < 2; ++k) {
      int c = (ni.rr + k) % 2;
      if (ni.active[c].on && ni.local[ni.active[c].vc].credits > 0) {
        pick = c;
        break;
      }
    }
    if (pick < 0) continue;
    ni.rr = (pick + 1) % 2;
    auto& act = ni.active[pick];
    const SimPacket& sp = live_.at(act.pkt);
    Flit f{act.pkt, act.next_seq, act.next_seq == 0, act.next_seq + 1 == sp.flits, 0};
    OutVc& o = ni.local[act.vc];
    --o.credits;
    write_flit(n, Port::Local, act.vc, f);
    ++act.next_seq;
    if (f.tail) {
      o.tail_sent = true;
      act.on = false;
    }
  }
}

void Network::route_heads(NodeId r) {
  Router& rt = routers_[r];
  for (int p = 0; p < kPortCount; ++p) {
    for (int v = 0; v < vc_count(); ++v) {
      InputVc& iv = rt.in[p][v];
      if (iv.buf.empty() || iv.decided) continue;
      const Flit& f = iv.buf.front();
      if (!f.head || f.ready > now_) continue;
      std::uint64_t key = iv.gate_key;
      if (key != 0 && rt.flow_gate[key].front() != f.pkt) continue;

      SimPacket& sp = live_.at(f.pkt);
      HeadDecision d = hooks_.on_head(r, static_cast<Port>(p), sp, now_);
      if (d.kind == HeadDecision::Kind::Wait) continue;
      iv.decided = true;
      iv.eligible_at = now_ + d.stall;
      if (d.kind == HeadDecision::Kind::Drop) {
        iv.drop = true;
        iv.out_port = Port::Local;
      } else if (d.kind == HeadDecision::Kind::Eject) {
        iv.out_port = Port::Local;
      } else {
        if (d.port == Port::Local || !topo_.neighbor(r, d.port)) {
          throw SimulationError("router " + std::to_string(r) + " routed packet " + std::to_string(f.pkt) +
                                " off the mesh via port " + std::string(to_string(d.port)));
        }
        iv.out_port = d.port;
      }
      emit(now_, r, Stage::RC, f.pkt, f.seq);
    }
  }
}

int Network::free_out_vc(Router& rt, Port op, VcClass c) {
  int n = vcs_of(c);
  int base = first_vc(c);
  int start = rt.va_rr[port_index(op)];
  for (int k = 0; k < n; ++k) {
    int v = base + (start + k) % n;
    if (!rt.out[port_index(op)][v].busy) return v;
  }
  return -1;
}

void Network::release_if_done(OutVc& o, int vc) const noexcept {
  if (o.busy && o.tail_sent && o.credits == depth(vc)) {
    o.busy = false;
    o.tail_sent = false;
  }
}

void Network::allocate(NodeId r) {
  Router& rt = routers_[r];
  std::array<int, kPortCount> chosen;
  std::array<int, kPortCount> target;
  chosen.fill(-1);
  target.fill(-1);

  for (int p = 0; p < kPortCount; ++p) {
    int n = vc_count();
    for (int k = 0; k < n; ++k) {
      int v = (rt.in_rr[p] + k) % n;
      InputVc& iv = rt.in[p][v];
      if (iv.buf.empty() || !iv.decided || iv.eligible_at > now_) continue;
      const Flit& f = iv.buf.front();
      if (f.ready > now_) continue;
      Port op = iv.out_port;
      if (!iv.drop && op != Port::Local) {
        if (f.head) {
          if (free_out_vc(rt, op, class_of(v)) < 0) continue;
        } else if (rt.out[port_index(op)][iv.out_vc].credits <= 0) {
          continue;
        }
      }
      chosen[p] = v;
      target[p] = port_index(op);
      break;
    }
  }

  for (int op = 0; op < kPortCount; ++op) {
    int winner = -1;
    for (int k = 0; k < kPortCount; ++k) {
      int p = (rt.out_rr[op] + k) % kPortCount;
      if (chosen[p] >= 0 && target[p] == op) {
        winner = p;
        break;
      }
    }
    if (winner < 0) continue;
    rt.out_rr[op] = (winner + 1) % kPortCount;
    int v = chosen[winner];
    rt.in_rr[winner] = (v + 1) % vc_count();

    InputVc& iv = rt.in[winner][v];
    Flit f = iv.buf.front();
    iv.buf.pop_front();
    --rt.flits;
    Port out = static_cast<Port>(op);

    emit(now_, r, Stage::SA, f.pkt, f.seq);
    emit(now_ + 1, r, Stage::LT, f.pkt, f.seq);
    if (iv.drop || out == Port::Local) {
      schedule(now_ + 2, {EventKind::Eject, r, Port::Local, v, f, iv.drop});
    } else {
      if (f.head) {
        iv.out_vc = free_out_vc(rt, out, class_of(v));
        int n = vcs_of(class_of(v));
        rt.va_rr[op] = (iv.out_vc - first_vc(class_of(v)) + 1) % n;
        OutVc& o = rt.out[op][iv.out_vc];
        o.busy = true;
        o.tail_sent = false;
      }
      OutVc& o = rt.out[op][iv.out_vc];
      --o.credits;
      if (f.tail) o.tail_sent = true;
      NodeId next = *topo_.neighbor(r, out);
      schedule(now_ + 2, {EventKind::Arrive, next, opposite(out), iv.out_vc, f, false});
    }

    Port in_port = static_cast<Port>(winner);
    if (in_port == Port::Local) {
      schedule(now_ + 1, {EventKind::Credit, r, Port::Local, v, {}, true});
    } else {
      NodeId up = *topo_.neighbor(r, in_port);
      schedule(now_ + 1, {EventKind::Credit, up, opposite(in_port), v, {}, false});
    }

    if (f.head) {
      std::uint64_t key = iv.gate_key;
      if (key != 0) {
        auto it = rt.flow_gate.find(key);
        it->second.pop_front();
        if (it->second.empty()) rt.flow_gate.erase(it);
      }
    }
    if (f.tail) {
      iv.decided = false;
      iv.drop = false;
      iv.out_vc = -1;
      iv.pkt = 0;
    }
  }
}

void Network::finish(std::uint64_t pkt, NodeId where, bool dropped) {
  auto it = live_.find(pkt);
  SimPacket sp = it->second;
  live_.erase(it);
  if (dropped) {
    hooks_.on_dropped(where, sp, now_);
  } else {
    hooks_.on_delivered(where, sp, now_);
  }
}

StallReport Network::stall_report() const {
  StallReport rep;
  rep.cycle = now_;
  rep.packets_in_flight = live_.size();
  rep.packets_waiting_at_ni = pending_.size();
  for (const Ni& ni : nis_) rep.packets_waiting_at_ni += ni.queue[0].size() + ni.queue[1].size();
  for (NodeId r = 0; r < routers_.size(); ++r) {
    for (int p = 0; p < kPortCount; ++p) {
      for (int v = 0; v < vc_count(); ++v) {
        const InputVc& iv = routers_[r].in[p][v];
        if (iv.buf.empty()) continue;
        rep.stuck.push_back({r, static_cast<Port>(p), v, iv.buf.front().pkt, iv.buf.front().seq, iv.buf.size(), iv.decided});
      }
    }
  }
  return rep;
}

}  // namespace learn
