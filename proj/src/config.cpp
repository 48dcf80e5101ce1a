#include "learn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace learn {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError(key + ": expected " + expected + ", got '" + value + "'");
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  double d = 0;
  std::string rest;
  if (!(is >> d) || (is >> rest)) bad_value(key, v, "a number");
  return d;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::string fmt_double(double d) {
  std::ostringstream os;
  os << d;
  return os.str();
}

struct Entry {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define UINT_ENTRY(name, type)                                                                  \
  Entry {                                                                                      \
    #name, [](RunConfig& c, const std::string& v) { c.name = parse_unsigned<type>(#name, v); }, \
        [](const RunConfig& c) { return std::to_string(c.name); }                             \
  }
#define INT_ENTRY(name)                                                            \
  Entry {                                                                         \
    #name, [](RunConfig& c, const std::string& v) { c.name = parse_int(#name, v); }, \
        [](const RunConfig& c) { return std::to_string(c.name); }                \
  }
#define BOOL_ENTRY(name)                                                            \
  Entry {                                                                          \
    #name, [](RunConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }, \
        [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); } \
  }
#define DOUBLE_ENTRY(name)                                                            \
  Entry {                                                                            \
    #name, [](RunConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
        [](const RunConfig& c) { return fmt_double(c.name); }                       \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      INT_ENTRY(width),
      INT_ENTRY(height),
      Entry{"scheme", [](RunConfig& c, const std::string& v) { c.scheme = parse_scheme(v); },
            [](const RunConfig& c) { return std::string(to_string(c.scheme)); }},
      Entry{"pattern", [](RunConfig& c, const std::string& v) { c.pattern = parse_pattern(v); },
            [](const RunConfig& c) { return std::string(to_string(c.pattern)); }},
      Entry{"trace", [](RunConfig& c, const std::string& v) { c.trace = v; },
            [](const RunConfig& c) { return c.trace; }},
      DOUBLE_ENTRY(rate),
      UINT_ENTRY(cycles, Cycle),
      UINT_ENTRY(seed, std::uint64_t),
      UINT_ENTRY(drain_cap, Cycle),
      UINT_ENTRY(enc_cycles, std::uint32_t),
      UINT_ENTRY(dec_cycles, std::uint32_t),
      UINT_ENTRY(polygen_cycles, std::uint32_t),
      UINT_ENTRY(dt_hop_cycles, std::uint32_t),
      UINT_ENTRY(evolve_cycles, std::uint32_t),
      BOOL_ENTRY(evolve),
      Entry{"pad_m",
            [](RunConfig& c, const std::string& v) {
              if (v.empty() || v == "default") {
                c.pad_m.reset();
              } else {
                c.pad_m = parse_unsigned<std::uint32_t>("pad_m", v);
              }
            },
            [](const RunConfig& c) { return c.pad_m ? std::to_string(*c.pad_m) : std::string("default"); }},
      UINT_ENTRY(pad_intermediate, std::uint32_t),
      UINT_ENTRY(table_capacity, std::uint32_t),
      Entry{"ri_mode",
            [](RunConfig& c, const std::string& v) {
              if (v == "xy") {
                c.ri_mode = RiMode::XY;
              } else if (v == "flood") {
                c.ri_mode = RiMode::Flood;
              } else {
                bad_value("ri_mode", v, "xy or flood");
              }
            },
            [](const RunConfig& c) { return std::string(c.ri_mode == RiMode::XY ? "xy" : "flood"); }},
      UINT_ENTRY(flit_bits, std::uint32_t),
      INT_ENTRY(data_vcs),
      INT_ENTRY(data_vc_depth),
      INT_ENTRY(control_vcs),
      INT_ENTRY(control_vc_depth),
      DOUBLE_ENTRY(data_fraction),
      UINT_ENTRY(control_bits, std::uint32_t),
      UINT_ENTRY(data_bits, std::uint32_t),
      UINT_ENTRY(session_length, std::uint64_t),
      Entry{"injectors",
            [](RunConfig& c, const std::string& v) {
              if (v == "all") {
                c.injectors = Injectors::All;
              } else if (v == "trusted") {
                c.injectors = Injectors::Trusted;
              } else {
                bad_value("injectors", v, "all or trusted");
              }
            },
            [](const RunConfig& c) { return std::string(c.injectors == Injectors::All ? "all" : "trusted"); }},
      INT_ENTRY(trusted_cores),
      INT_ENTRY(memory_controllers),
      Entry{"tornado",
            [](RunConfig& c, const std::string& v) {
              if (v == "ceil") {
                c.tornado = TornadoOffset::Ceil;
              } else if (v == "floor") {
                c.tornado = TornadoOffset::Floor;
              } else {
                bad_value("tornado", v, "ceil or floor");
              }
            },
            [](const RunConfig& c) { return std::string(c.tornado == TornadoOffset::Ceil ? "ceil" : "floor"); }},
      BOOL_ENTRY(crypto_on_control),
      Entry{"out", [](RunConfig& c, const std::string& v) { c.out = v; }, [](const RunConfig& c) { return c.out; }},
      BOOL_ENTRY(trace_events),
  };
  return table;
}

#undef UINT_ENTRY
#undef INT_ENTRY
#undef BOOL_ENTRY
#undef DOUBLE_ENTRY

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const Entry& e : entries()) {
    if (key == e.key) {
      e.set(cfg, value);
      return;
    }
  }
  throw ConfigError(key + ": unknown configuration key");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Entry& e : entries()) out.emplace_back(e.key);
  return out;
}

void RunConfig::validate() const {
  if (width < 1 || height < 1 || width * height < 2) throw ConfigError("width: mesh needs at least 2 nodes");
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("rate: must lie in [0, 1], got " + fmt_double(rate));
  if (!(data_fraction >= 0.0 && data_fraction <= 1.0)) throw ConfigError("data_fraction: must lie in [0, 1]");
  if (dt_hop_cycles > 4) throw ConfigError("dt_hop_cycles: must lie in [0, 4]");
  if (table_capacity == 0) throw ConfigError("table_capacity: must be positive");
  if (flit_bits == 0) throw ConfigError("flit_bits: must be positive");
  if (data_vcs < 1) throw ConfigError("data_vcs: must be at least 1");
  if (control_vcs < 1) throw ConfigError("control_vcs: must be at least 1");
  if (data_vc_depth < 1) throw ConfigError("data_vc_depth: must be at least 1");
  if (control_vc_depth < 1) throw ConfigError("control_vc_depth: must be at least 1");
  if (control_bits == 0) throw ConfigError("control_bits: must be positive");
  if (data_bits == 0) throw ConfigError("data_bits: must be positive");
  if (trusted_cores < 0) throw ConfigError("trusted_cores: must be non-negative");
  if (memory_controllers < 0) throw ConfigError("memory_controllers: must be non-negative");
  if (trace.empty()) validate_pattern(pattern, width, height);
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  for (const Entry& e : entries()) os << e.key << " = " << e.get(*this) << '\n';
  return os.str();
}

std::map<std::string, std::string> parse_config_text(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig build_config(const std::map<std::string, std::string>& file_values,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  for (const auto& [k, v] : file_values) set_config_value(cfg, k, v);
  for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  return build_config(parse_config_text(in), overrides);
}

}  // namespace learn
