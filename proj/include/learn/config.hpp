#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "learn/baseline.hpp"
#include "learn/common.hpp"
#include "learn/traffic.hpp"

namespace learn {

enum class Injectors { All, Trusted };
enum class RiMode { XY, Flood };

struct RunConfig {
  int width = 8;
  int height = 8;
  Scheme scheme = Scheme::None;
  Pattern pattern = Pattern::URD;
  std::string trace;
  double rate = 0.01;
  Cycle cycles = 20000;
  std::uint64_t seed = 1;
  Cycle drain_cap = 200000;

  std::uint32_t enc_cycles = 12;
  std::uint32_t dec_cycles = 12;
  std::uint32_t polygen_cycles = 200;
  std::uint32_t dt_hop_cycles = 1;
  std::uint32_t evolve_cycles = 1;

  bool evolve = false;
  std::optional<std::uint32_t> pad_m;
  std::uint32_t pad_intermediate = 0;
  std::uint32_t table_capacity = 256;
  RiMode ri_mode = RiMode::XY;

  std::uint32_t flit_bits = 128;
  int data_vcs = 4;
  int data_vc_depth = 4;
  int control_vcs = 2;
  int control_vc_depth = 1;

  double data_fraction = 0.5;
  std::uint32_t control_bits = 64;
  std::uint32_t data_bits = 576;
  std::uint64_t session_length = 0;
  Injectors injectors = Injectors::All;
  int trusted_cores = 16;
  int memory_controllers = 8;
  TornadoOffset tornado = TornadoOffset::Ceil;
  /// Baseline packets that pay crypto: every packet, or data-sized ones only.
  bool crypto_on_control = true;

  std::string out;
  bool trace_events = false;

  bool effective_evolve() const noexcept { return evolve || scheme == Scheme::LearnHardened; }
  std::uint32_t effective_pad_m() const noexcept {
    return pad_m.value_or(scheme == Scheme::LearnHardened ? 2u : 0u);
  }

  /// Throws ConfigError naming the first offending key.
  void validate() const;
  /// Every key as "key = value", one per line, in a fixed order.
  std::string echo() const;
};

/// Sets one key from its text form. Throws ConfigError on an unknown key or a bad value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(std::istream& in);

/// Applies file values, then overrides, then validates.
RunConfig build_config(const std::map<std::string, std::string>& file_values,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

RunConfig load_config_file(const std::string& path,
                           const std::vector<std::pair<std::string, std::string>>& overrides = {});

std::vector<std::string> config_keys();

}  // namespace learn
