// Acceptance gate: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the numbered ones. Exit status is the number
// of failing criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>

#include "learn/experiment.hpp"
#include "learn/kernels.hpp"
#include "learn/sharing.hpp"
#include "oracles.hpp"

using namespace learn;
using namespace learn::acceptance;

namespace {

// Pinned thresholds.
constexpr std::size_t kSharingTrials = 10000;
constexpr double kSharingSeconds = 10.0;
constexpr double kThresholdSeconds = 1.0;
constexpr std::size_t kEvolutionTrials = 1000;
constexpr std::uint64_t kTableSessions = 256;
constexpr std::uint64_t kTableBytes = 20480;
constexpr Cycle kOrderingCycles = 110000;
constexpr std::uint64_t kMinSessionDts = 1000;
constexpr double kOrderingSeconds = 120.0;
constexpr double kLearnImprovementFloor = 50.0;
constexpr double kHardenedImprovementFloor = 40.0;
constexpr std::size_t kDecorrelationDts = 100;
constexpr int kOraclePairs = 10;
constexpr Cycle kSecondPacketAt = 40000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

RunConfig mesh_config(Scheme s, Cycle cycles, std::uint64_t seed) {
  RunConfig c;
  c.scheme = s;
  c.cycles = cycles;
  c.seed = seed;
  c.rate = 0.01;
  c.validate();
  return c;
}

// ---------------------------------------------------------------- 1

Outcome sharing_correctness() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  std::size_t ok = 0;
  for (std::size_t t = 0; t < kSharingTrials; ++t) {
    const std::size_t hops = 2 + t % 14;
    const bool hardened = t % 2 == 1;
    LearnParams params;
    params.evolve = hardened;
    params.pad_destination = hardened ? 2 : 0;
    ProtocolLine line(hops + 1, params, derive_seed(7, t));
    auto session = line.establish();
    if (!session) continue;
    bool good = true;
    for (int m = 0; m < (hardened ? 2 : 1); ++m) {
      Bytes payload(1 + rng() % 72);
      for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
      auto got = line.transfer(*session, payload);
      good = good && got && *got == payload;
    }
    ok += good;
  }
  const double secs = seconds_since(t0);
  return {ok == kSharingTrials && secs < kSharingSeconds,
          std::to_string(ok) + "/" + std::to_string(kSharingTrials) + " sessions delivered intact, " + fmt(secs, 2) +
              " s"};
}

// ---------------------------------------------------------------- 2

Outcome threshold_property() {
  auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t p = 13;
  PrimeField f(p);
  // A fixed secret polynomial 7 + 4x + 9x^2 shared at x = 1..12.
  auto eval = [&](std::uint64_t x) { return (7 + 4 * x + 9 * x * x) % p; };
  std::size_t subsets = 0;
  std::size_t uniform = 0;
  for (std::uint64_t a = 1; a < p; ++a) {
    for (std::uint64_t b = a + 1; b < p; ++b) {
      ++subsets;
      std::vector<SharePoint> known = {{{a}, {eval(a)}, {}}, {{b}, {eval(b)}, {}}};
      auto hist = secret_histogram_parallel(f, 3, known);
      // Independent brute force with plain integer arithmetic.
      std::vector<std::uint64_t> oracle(p, 0);
      for (std::uint64_t c0 = 0; c0 < p; ++c0) {
        for (std::uint64_t c1 = 0; c1 < p; ++c1) {
          for (std::uint64_t c2 = 0; c2 < p; ++c2) {
            if ((c0 + c1 * a + c2 * a * a) % p == eval(a) && (c0 + c1 * b + c2 * b * b) % p == eval(b)) ++oracle[c0];
          }
        }
      }
      bool all_one = std::all_of(hist.begin(), hist.end(), [](std::uint64_t c) { return c == 1; });
      uniform += all_one && hist == oracle && hist == secret_histogram_serial(f, 3, known);
    }
  }
  const double secs = seconds_since(t0);
  return {uniform == subsets && secs < kThresholdSeconds,
          std::to_string(uniform) + "/" + std::to_string(subsets) +
              " two-share subsets leave all 13 secrets equally likely, " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------- 3

Outcome evolution_equivalence() {
  const PrimeField& f = PrimeField::mersenne61();
  Rng rng(99);
  std::size_t done = 0;
  std::size_t mismatches = 0;
  std::size_t checked = 0;
  while (done < kEvolutionTrials) {
    SharedSecret s = generate_share_set(f, 2 + done % 14, rng);
    const FieldElement x0 = s.set.points[0].x;
    const FieldElement x1 = random_nonzero(f, rng);
    std::vector<std::uint64_t> xs{x1.value};
    bool collides = x1 == x0;
    for (std::size_t i = 1; i < s.set.points.size(); ++i) {
      xs.push_back(s.set.points[i].x.value);
      collides = collides || s.set.points[i].x == x1;
    }
    if (collides) continue;
    auto oracle = lagrange_oracle(xs, f.modulus());
    std::vector<FieldElement> xe;
    for (auto v : xs) xe.push_back({v});
    auto recomputed = lagrange_coeffs(f, xe);
    for (std::size_t i = 1; i < s.set.points.size(); ++i) {
      FieldElement b = evolve_share(f, s.set.points[i], x0, x1).b;
      mismatches += b.value != oracle[i] || b != recomputed[i];
      ++checked;
    }
    ++done;
  }
  return {mismatches == 0, std::to_string(done) + " substitutions, " + std::to_string(checked) +
                               " evolved coefficients, " + std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------- 4

Outcome anonymity_scan() {
  RunConfig cfg = mesh_config(Scheme::Learn, 20000, 4);
  cfg.session_length = 100;
  Experiment e(cfg);
  const std::size_t n = e.topology().node_count();

  // Eight-byte windows of every identifier: node tokens and both halves of each global public key.
  std::unordered_set<std::uint64_t> needles;
  for (NodeId i = 0; i < n; ++i) {
    needles.insert(e.node_token(i));
    needles.insert(e.node_public_id(i).lo);
    needles.insert(e.node_public_id(i).hi);
  }
  auto window_hits = [&](const Bytes& b) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i + 8 <= b.size(); ++i) {
      std::uint64_t w = 0;
      for (int k = 7; k >= 0; --k) w = (w << 8) | b[i + static_cast<std::size_t>(k)];
      std::uint64_t be = 0;
      for (int k = 0; k < 8; ++k) be = (be << 8) | b[i + static_cast<std::size_t>(k)];
      hits += needles.count(w) + needles.count(be);
    }
    return hits;
  };

  std::map<PacketKind, std::size_t> scanned;
  std::size_t leaking = 0;
  e.taps().on_wire = [&](NodeId, const Packet& p) {
    if (p.kind == PacketKind::RI) return;
    ++scanned[p.kind];
    leaking += window_hits(p.serialize()) > 0;
  };
  MetricsReport r = e.run();

  // Router state: no identifiers of other nodes, and no row links to another row at the same router.
  std::size_t window_violations = 0;
  std::size_t rows = 0;
  std::size_t state_leaks = 0;
  for (NodeId i = 0; i < n; ++i) {
    std::set<std::uint64_t> ins;
    std::set<std::uint64_t> outs;
    for (const RowKnowledge& k : e.node(i).knowledge_audit()) {
      ++rows;
      ins.insert(k.vcn_in);
      if (k.vcn_out) outs.insert(*k.vcn_out);
    }
    for (auto v : outs) window_violations += ins.count(v);
    needles.erase(e.node_token(i));
    needles.erase(e.node_public_id(i).lo);
    needles.erase(e.node_public_id(i).hi);
    state_leaks += window_hits(e.node(i).serialize_state());
    needles.insert(e.node_token(i));
    needles.insert(e.node_public_id(i).lo);
    needles.insert(e.node_public_id(i).hi);
  }
  const std::size_t total = scanned[PacketKind::RA] + scanned[PacketKind::RC] + scanned[PacketKind::DT];
  const bool pass = r.complete && scanned[PacketKind::RA] > 0 && scanned[PacketKind::RC] > 0 &&
                    scanned[PacketKind::DT] > 0 && leaking == 0 && window_violations == 0 && state_leaks == 0;
  return {pass, std::to_string(total) + " RA/RC/DT wire images (" + std::to_string(scanned[PacketKind::RA]) + " RA, " +
                    std::to_string(scanned[PacketKind::RC]) + " RC, " + std::to_string(scanned[PacketKind::DT]) +
                    " DT), " + std::to_string(leaking) + " carry an identifier; " + std::to_string(rows) +
                    " audited rows, " + std::to_string(window_violations) + " link beyond one neighbour each way, " +
                    std::to_string(state_leaks) + " identifier hits in router state"};
}

// ---------------------------------------------------------------- 5

Outcome packet_ratio() {
  constexpr std::uint64_t kN = 50;
  RunConfig cfg = mesh_config(Scheme::Learn, 30000, 5);
  cfg.session_length = kN;
  Experiment e(cfg);
  MetricsReport r = e.run();
  std::map<std::pair<NodeId, std::uint32_t>, std::uint64_t> per_conv;
  for (const auto& t : e.traffic()) ++per_conv[{t.src, t.conversation}];
  std::size_t bad = 0;
  std::size_t full = 0;
  for (const auto& s : e.sessions()) {
    const std::uint64_t want = per_conv.at({s.src, s.conversation});
    bad += s.ri != 1 || s.ra != 1 || s.rc != 1 || s.dt_sent != want || s.dt_delivered != want;
    full += want == kN && s.dt_sent == kN;
  }
  const bool pass = r.complete && bad == 0 && full > 0 && r.ri == r.ra && r.ra == r.rc &&
                    r.rc == e.sessions().size() && r.dt == e.traffic().size();
  return {pass, std::to_string(e.sessions().size()) + " sessions, " + std::to_string(bad) +
                    " off the 1:1:1:N pattern, " + std::to_string(full) + " full conversations carried exactly " +
                    std::to_string(kN) + " DTs; totals RI:RA:RC:DT = " + std::to_string(r.ri) + ":" +
                    std::to_string(r.ra) + ":" + std::to_string(r.rc) + ":" + std::to_string(r.dt)};
}

// ---------------------------------------------------------------- 6

Outcome key_table_sizing() {
  LearnParams params;
  params.table_capacity = kTableSessions;
  ProtocolLine line(3, params, 6);
  std::uint64_t established = 0;
  for (std::uint64_t i = 0; i < kTableSessions; ++i) established += line.establish().has_value();
  const std::uint64_t bytes = line.at(1).keytable_bytes();
  const bool overflow_refused = !line.establish().has_value();
  return {established == kTableSessions && bytes == kTableBytes && overflow_refused,
          std::to_string(established) + " sessions through the middle router occupy " + std::to_string(bytes) +
              " bytes (" + std::to_string(bytes / std::max<std::uint64_t>(1, established)) + " per row); session " +
              std::to_string(kTableSessions + 1) + (overflow_refused ? " refused" : " accepted")};
}

// ---------------------------------------------------------------- 7, 8, 9

struct Sweep {
  std::map<Scheme, MetricsReport> reports;
  std::uint64_t min_session_dts = 0;
  std::size_t sessions = 0;
  double seconds = 0;
  bool complete = true;
};

const Sweep& ordering_sweep() {
  static const Sweep sweep = [] {
    Sweep s;
    auto t0 = std::chrono::steady_clock::now();
    Experiment learn_run(mesh_config(Scheme::Learn, kOrderingCycles, 1));
    s.reports[Scheme::Learn] = learn_run.run();
    s.min_session_dts = UINT64_MAX;
    for (const auto& rec : learn_run.sessions()) s.min_session_dts = std::min(s.min_session_dts, rec.dt_sent);
    s.sessions = learn_run.sessions().size();
    std::vector<RunConfig> rest;
    for (Scheme sc : {Scheme::None, Scheme::EncOnly, Scheme::Onion, Scheme::LearnHardened}) {
      rest.push_back(mesh_config(sc, kOrderingCycles, 1));
    }
    auto reports = run_sweep_parallel(rest);
    for (std::size_t i = 0; i < rest.size(); ++i) s.reports[rest[i].scheme] = reports[i];
    for (const auto& [sc, r] : s.reports) s.complete = s.complete && r.complete;
    s.seconds = seconds_since(t0);
    return s;
  }();
  return sweep;
}

std::uint64_t total(Scheme s) { return ordering_sweep().reports.at(s).total_noc_delay; }

double improvement_vs_onion(Scheme s) {
  return 100.0 * (1.0 - static_cast<double>(total(s)) / static_cast<double>(total(Scheme::Onion)));
}

Outcome performance_ordering() {
  const Sweep& s = ordering_sweep();
  const bool precondition = s.complete && s.min_session_dts >= kMinSessionDts;
  const bool ordered = total(Scheme::None) < total(Scheme::Learn) && total(Scheme::Learn) < total(Scheme::EncOnly) &&
                       total(Scheme::EncOnly) < total(Scheme::Onion);
  std::ostringstream os;
  os << "8x8 URD 0.01, " << kOrderingCycles << " cycles, seed 1, " << s.sessions << " sessions with >= "
     << s.min_session_dts << " DTs each; NoC delay none " << total(Scheme::None) << ", learn "
     << total(Scheme::Learn) << ", enc " << total(Scheme::EncOnly) << ", onion " << total(Scheme::Onion) << "; "
     << fmt(s.seconds) << " s";
  if (!precondition) os << "; precondition not met";
  if (!ordered) os << "; order none < learn < enc < onion does not hold";
  return {precondition && ordered && s.seconds < kOrderingSeconds, os.str()};
}

/// Single packets on an idle 8x8 mesh against the closed-form latency, optionally
/// also replaying each event log by hand.
struct OracleCheck {
  std::size_t runs = 0;
  std::size_t latency_mismatches = 0;
  std::size_t log_mismatches = 0;
  std::string first_error;
};

std::vector<std::pair<NodeId, NodeId>> oracle_pairs() {
  Rng rng(1111);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  while (pairs.size() < static_cast<std::size_t>(kOraclePairs)) {
    NodeId s = static_cast<NodeId>(rng() % 64);
    NodeId d = static_cast<NodeId>(rng() % 64);
    if (s != d) pairs.emplace_back(s, d);
  }
  return pairs;
}

const OracleCheck& zero_load_check() {
  static const OracleCheck check = [] {
    OracleCheck c;
    for (auto [src, dst] : oracle_pairs()) {
      for (Scheme sc : {Scheme::None, Scheme::EncOnly, Scheme::Onion, Scheme::Learn}) {
        for (std::uint32_t bits : {64u, 576u}) {
          RunConfig cfg = mesh_config(sc, 1, 8);
          Topology topo(cfg.width, cfg.height, cfg.seed, cfg.trusted_cores, cfg.memory_controllers);
          const int hops = topo.hops(src, dst);
          const std::uint32_t flits = flits_for(bits, cfg.flit_bits);
          std::vector<NodeId> routers{src};
          for (NodeId r : topo.xy_path(src, dst)) routers.push_back(r);

          const bool learn = is_learn(sc);
          // A DT is measured after its session is up: the same run with and without a later second packet.
          const Cycle at = learn ? kSecondPacketAt : 0;
          std::vector<TrafficRecord> first = {{0, src, dst, bits, 0}};
          std::vector<TrafficRecord> both = first;
          both.push_back({kSecondPacketAt, src, dst, bits, 0});

          std::vector<TraceEvent> events;
          Experiment run(cfg, learn ? both : first);
          run.taps().on_trace = [&](const TraceEvent& e) {
            if (e.cycle >= at) events.push_back(e);
          };
          MetricsReport r = run.run();
          std::uint64_t measured = r.total_noc_delay;
          if (learn) measured -= Experiment(cfg, first).run().total_noc_delay;

          SchemeCosts costs = learn ? dt_costs(hops, cfg.dt_hop_cycles) : baseline_costs(sc, hops, cfg.enc_cycles);
          const std::uint64_t want = zero_load_latency(hops, flits, costs);
          ++c.runs;
          if (measured != want || !r.complete) {
            ++c.latency_mismatches;
            if (c.first_error.empty()) {
              c.first_error = std::string(to_string(sc)) + " " + std::to_string(src) + "->" + std::to_string(dst) +
                              ": measured " + std::to_string(measured) + ", closed form " + std::to_string(want);
            }
          }
          std::string err = check_event_log(events, routers, at, flits, costs);
          if (!err.empty()) {
            ++c.log_mismatches;
            if (c.first_error.empty()) {
              c.first_error = std::string(to_string(sc)) + " " + std::to_string(src) + "->" + std::to_string(dst) +
                              ": " + err;
            }
          }
        }
      }
    }
    return c;
  }();
  return check;
}

Outcome improvement_magnitude() {
  const Sweep& s = ordering_sweep();
  const OracleCheck& c = zero_load_check();
  const double imp = improvement_vs_onion(Scheme::Learn);
  std::string detail = "learn improves NoC delay vs onion by " + fmt(imp) + "% (floor " +
                       fmt(kLearnImprovementFloor, 0) + "%); zero-load oracle matched " +
                       std::to_string(c.runs - c.latency_mismatches) + "/" + std::to_string(c.runs) +
                       " single-packet runs";
  if (!c.first_error.empty() && c.latency_mismatches) detail += "; " + c.first_error;
  return {s.complete && imp >= kLearnImprovementFloor && c.latency_mismatches == 0, detail};
}

Outcome hardened_overhead() {
  const Sweep& s = ordering_sweep();
  const double imp = improvement_vs_onion(Scheme::LearnHardened);
  const bool direction = total(Scheme::LearnHardened) >= total(Scheme::Learn);
  return {s.complete && direction && imp >= kHardenedImprovementFloor,
          "learn-hardened NoC delay " + std::to_string(total(Scheme::LearnHardened)) + (direction ? " >= " : " < ") +
              "learn " + std::to_string(total(Scheme::Learn)) + "; improvement vs onion " + fmt(imp) + "% (floor " +
              fmt(kHardenedImprovementFloor, 0) + "%)"};
}

// ---------------------------------------------------------------- 10

Outcome decorrelation() {
  auto deltas_per_router = [](bool hardened) {
    LearnParams params;
    params.evolve = hardened;
    params.pad_destination = hardened ? 2 : 0;
    ProtocolLine line(6, params, hardened ? 10 : 11);
    std::map<std::size_t, std::set<std::uint64_t>> distinct;
    auto session = line.establish();
    if (!session) return distinct;
    Bytes payload(72, 0x42);
    for (std::size_t m = 0; m < kDecorrelationDts; ++m) {
      std::vector<std::pair<std::size_t, FieldElement>> hops;
      if (!line.transfer(*session, payload, &hops)) return std::map<std::size_t, std::set<std::uint64_t>>{};
      for (auto [router, d] : hops) distinct[router].insert(d.value);
    }
    return distinct;
  };
  auto hardened = deltas_per_router(true);
  auto base = deltas_per_router(false);
  std::size_t hardened_min = SIZE_MAX;
  std::size_t base_max = 0;
  for (const auto& [r, s] : hardened) hardened_min = std::min(hardened_min, s.size());
  for (const auto& [r, s] : base) base_max = std::max(base_max, s.size());
  const bool pass = hardened.size() == 5 && base.size() == 5 && hardened_min >= 2 && base_max == 1;
  return {pass, "over " + std::to_string(kDecorrelationDts) + " DTs on a 5-hop path: hardened routers see at least " +
                    std::to_string(hardened.empty() ? 0 : hardened_min) +
                    " distinct deltas each, base routers at most " + std::to_string(base_max)};
}

// ---------------------------------------------------------------- 11

Outcome pipeline_oracle() {
  const OracleCheck& c = zero_load_check();
  std::string detail = std::to_string(kOraclePairs) + " random pairs x {none, enc, onion, learn DT} x {1, 5} flits: " +
                       std::to_string(c.runs - c.log_mismatches) + "/" + std::to_string(c.runs) +
                       " event logs match the hand trace, " + std::to_string(c.runs - c.latency_mismatches) + "/" +
                       std::to_string(c.runs) + " latencies match 3(hops+1) + (flits-1) + stalls";
  if (!c.first_error.empty()) detail += "; " + c.first_error;
  return {c.runs > 0 && c.log_mismatches == 0 && c.latency_mismatches == 0, detail};
}

// ---------------------------------------------------------------- 12

Outcome determinism() {
  std::vector<RunConfig> configs;
  for (Scheme s : {Scheme::None, Scheme::EncOnly, Scheme::Onion, Scheme::Learn, Scheme::LearnHardened}) {
    configs.push_back(mesh_config(s, 20000, 12));
  }
  RunConfig trd = mesh_config(Scheme::LearnHardened, 10000, 13);
  trd.pattern = Pattern::TRD;
  trd.session_length = 40;
  configs.push_back(trd);
  auto a = run_sweep_parallel(configs);
  auto b = run_sweep_serial(configs);
  std::size_t same = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) same += a[i].csv_row() == b[i].csv_row();
  return {same == configs.size(), std::to_string(same) + "/" + std::to_string(configs.size()) +
                                      " configurations produced byte-identical CSV rows across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {
      sharing_correctness, threshold_property,    evolution_equivalence, anonymity_scan,
      packet_ratio,        key_table_sizing,      performance_ordering,  improvement_magnitude,
      hardened_overhead,   decorrelation,         pipeline_oracle,       determinism};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [criterion 1-12]...\n";
      return 64;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  int failed = 0;
  for (int n : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return failed;
}
