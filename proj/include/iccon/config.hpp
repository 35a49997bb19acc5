#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iccon/che.hpp"
#include "iccon/errors.hpp"
#include "iccon/simulator.hpp"

namespace iccon {

enum class ScenarioKind { kChurn, kPerRequest, kCheSweep };

inline const char* to_string(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::kChurn: return "churn";
    case ScenarioKind::kPerRequest: return "per-request";
    default: return "che-sweep";
  }
}

struct CheSweepSpec {
  CheSweepBase base;
  std::vector<double> alphas;
  std::vector<double> c_ratios;
};

/// A fully validated configuration document. `sim` is filled for churn and
/// per-request scenarios, `sweep` for che-sweep.
struct ParsedConfig {
  ScenarioKind scenario = ScenarioKind::kChurn;
  std::optional<SimConfig> sim;
  std::optional<CheSweepSpec> sweep;
  std::size_t slots = 0;                // per-request only
  std::uint64_t requests_per_slot = 0;  // per-request only
  std::optional<std::uint64_t> seed;    // from the `seed` key, if present
};

namespace detail {

struct RawValue {
  std::string text;
  int line = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

class ConfigReader {
 public:
  explicit ConfigReader(std::string_view text) {
    static const std::set<std::string, std::less<>> known = {
        "N", "M", "C", "c", "s", "lambda_c", "lambda_v", "U", "u", "w",
        "policy", "cache_policy", "topology", "seed",
        "stab_window_mult", "stab_eps", "stab_cap_mult",
        "scenario", "slots", "requests_per_slot", "alpha_list", "c_ratio_list"};
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t eol = text.find('\n', pos);
      std::string_view line =
          text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected `key = value`");
      const std::string key{trim(line.substr(0, eq))};
      const std::string value{trim(line.substr(eq + 1))};
      if (key.empty()) fail(line_no, "empty key");
      if (!known.contains(key)) fail(line_no, "unknown key '" + key + "'");
      if (values_.contains(key)) fail(line_no, "duplicate key '" + key + "'");
      if (value.empty()) fail(line_no, "key '" + key + "' has no value");
      values_[key] = RawValue{value, line_no};
    }
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  const RawValue& require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
  }

  std::uint64_t require_u64(const std::string& key) const { return parse_u64(key, require(key)); }

  std::uint64_t u64_or(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_u64(key, it->second);
  }

  double require_double(const std::string& key) const {
    return parse_double(key, require(key));
  }

  double double_or(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second.text;
  }

  /// Item count given either as an absolute integer or as `<pct>%C`;
  /// percentages resolve to floor(pct/100 * C), at least 1 item.
  std::size_t require_items(const std::string& key, std::size_t catalogue_size) const {
    const RawValue& raw = require(key);
    const std::size_t pct = raw.text.find('%');
    if (pct == std::string_view::npos)
      return static_cast<std::size_t>(parse_u64(key, raw));
    const std::string_view suffix = trim(std::string_view(raw.text).substr(pct + 1));
    if (suffix != "C")
      fail(raw.line, "key '" + key + "': expected `<percent>%C`, got '" + raw.text + "'");
    const std::string_view number = trim(std::string_view(raw.text).substr(0, pct));
    const double percent = parse_double_text(key, number, raw.line);
    if (percent < 0.0 || percent > 100.0)
      fail(raw.line, "key '" + key + "': percentage must lie in [0, 100]");
    const double items = std::floor(percent / 100.0 * static_cast<double>(catalogue_size));
    return items < 1.0 ? 1 : static_cast<std::size_t>(items);
  }

  std::vector<double> require_list(const std::string& key) const {
    const RawValue& raw = require(key);
    std::vector<double> out;
    std::string_view rest = raw.text;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view token = trim(rest.substr(0, comma));
      if (token.empty()) fail(raw.line, "key '" + key + "': empty list entry");
      out.push_back(parse_double_text(key, token, raw.line));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  /// Rejects keys that the declared scenario does not consume.
  void reject_unused(const std::vector<std::string>& applicable) const {
    for (const auto& [key, raw] : values_) {
      bool ok = false;
      for (const std::string& a : applicable) ok = ok || a == key;
      if (!ok) fail(raw.line, "key '" + key + "' does not apply to this scenario");
    }
  }

  int line_of(const std::string& key) const { return require(key).line; }

 private:
  static std::uint64_t parse_u64(const std::string& key, const RawValue& raw) {
    std::uint64_t value = 0;
    const char* begin = raw.text.data();
    const char* end = begin + raw.text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      fail(raw.line, "key '" + key + "': expected a non-negative integer, got '" + raw.text + "'");
    return value;
  }

  static double parse_double(const std::string& key, const RawValue& raw) {
    return parse_double_text(key, raw.text, raw.line);
  }

  static double parse_double_text(const std::string& key, std::string_view text, int line) {
    const std::string buf{text};
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || buf.empty())
      fail(line, "key '" + key + "': expected a number, got '" + buf + "'");
    return value;
  }

  std::map<std::string, RawValue> values_;
};

inline SelectionPolicy parse_policy(const std::string& text, int line) {
  if (text == "iccon") return SelectionPolicy::kIccon;
  if (text == "random") return SelectionPolicy::kRandom;
  fail(line, "policy must be `iccon` or `random`, got '" + text + "'");
}

inline CachePolicy parse_cache_policy(const std::string& text, int line) {
  if (text == "lfu") return CachePolicy::kLfu;
  if (text == "lru") return CachePolicy::kLru;
  fail(line, "cache_policy must be `lfu` or `lru`, got '" + text + "'");
}

inline Topology parse_topology(const std::string& text, int line) {
  if (text == "per-ap") return Topology::kPerAp;
  if (text == "shared") return Topology::kShared;
  fail(line, "topology must be `per-ap` or `shared`, got '" + text + "'");
}

}  // namespace detail

/// Parses and validates a flat `key = value` configuration document.
/// Unknown keys, duplicates, malformed values, and invariant violations are
/// rejected with the key name and line number.
inline ParsedConfig parse_config(std::string_view text) {
  detail::ConfigReader reader(text);
  ParsedConfig parsed;

  const detail::RawValue& scenario_raw = reader.require("scenario");
  if (scenario_raw.text == "churn") {
    parsed.scenario = ScenarioKind::kChurn;
  } else if (scenario_raw.text == "per-request") {
    parsed.scenario = ScenarioKind::kPerRequest;
  } else if (scenario_raw.text == "che-sweep") {
    parsed.scenario = ScenarioKind::kCheSweep;
  } else {
    detail::fail(scenario_raw.line,
                 "scenario must be `churn`, `per-request` or `che-sweep`, got '" +
                     scenario_raw.text + "'");
  }

  if (reader.has("seed")) parsed.seed = reader.require_u64("seed");

  if (parsed.scenario == ScenarioKind::kCheSweep) {
    reader.reject_unused({"scenario", "seed", "C", "s", "lambda_c", "alpha_list", "c_ratio_list"});
    CheSweepSpec spec;
    spec.base.catalogue_size = static_cast<std::size_t>(reader.require_u64("C"));
    spec.base.slope = reader.require_double("s");
    spec.base.request_rate = reader.require_double("lambda_c");
    spec.alphas = reader.require_list("alpha_list");
    spec.c_ratios = reader.require_list("c_ratio_list");
    if (spec.base.catalogue_size == 0)
      detail::fail(reader.line_of("C"), "C must be at least 1");
    if (spec.base.slope < 0.0) detail::fail(reader.line_of("s"), "s must be non-negative");
    if (spec.base.request_rate <= 0.0)
      detail::fail(reader.line_of("lambda_c"), "lambda_c must be positive");
    for (double a : spec.alphas)
      if (a < 1.0) detail::fail(reader.line_of("alpha_list"), "alpha values must be >= 1");
    for (double r : spec.c_ratios)
      if (r <= 0.0 || r > 1.0)
        detail::fail(reader.line_of("c_ratio_list"), "c ratios must lie in (0, 1]");
    parsed.sweep = std::move(spec);
    return parsed;
  }

  std::vector<std::string> applicable = {"scenario", "seed", "N", "M", "C", "c", "s",
                                         "lambda_c", "lambda_v", "U", "u", "w",
                                         "policy", "cache_policy", "topology",
                                         "stab_window_mult", "stab_eps", "stab_cap_mult"};
  if (parsed.scenario == ScenarioKind::kPerRequest) {
    applicable.push_back("slots");
    applicable.push_back("requests_per_slot");
  }
  reader.reject_unused(applicable);

  SimConfig sim;
  sim.ue_count = static_cast<std::size_t>(reader.require_u64("N"));
  sim.ap_count = static_cast<std::size_t>(reader.require_u64("M"));
  sim.catalogue_size = static_cast<std::size_t>(reader.require_u64("C"));
  sim.cache_size = reader.require_items("c", sim.catalogue_size);
  sim.slope = reader.require_double("s");
  sim.request_rate = reader.require_double("lambda_c");
  sim.churn_rate = reader.require_double("lambda_v");
  sim.profile_count = static_cast<std::size_t>(reader.require_u64("U"));
  sim.profile_size = reader.require_items("u", sim.catalogue_size);
  sim.fit_weight = reader.require_double("w");
  sim.policy = detail::parse_policy(reader.string_or("policy", "iccon"),
                                    reader.has("policy") ? reader.line_of("policy") : 0);
  sim.cache_policy =
      detail::parse_cache_policy(reader.string_or("cache_policy", "lfu"),
                                 reader.has("cache_policy") ? reader.line_of("cache_policy") : 0);
  sim.topology = detail::parse_topology(reader.string_or("topology", "per-ap"),
                                        reader.has("topology") ? reader.line_of("topology") : 0);
  if (parsed.seed) sim.seed = *parsed.seed;
  sim.stabilization.window_mult =
      static_cast<std::size_t>(reader.u64_or("stab_window_mult", 10));
  sim.stabilization.epsilon = reader.double_or("stab_eps", 0.005);
  sim.stabilization.cap_mult = static_cast<std::size_t>(reader.u64_or("stab_cap_mult", 100));

  try {
    sim.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }

  if (parsed.scenario == ScenarioKind::kPerRequest) {
    parsed.slots = static_cast<std::size_t>(reader.require_u64("slots"));
    parsed.requests_per_slot = reader.require_u64("requests_per_slot");
    if (parsed.slots == 0) detail::fail(reader.line_of("slots"), "slots must be at least 1");
    if (parsed.requests_per_slot == 0)
      detail::fail(reader.line_of("requests_per_slot"), "requests_per_slot must be at least 1");
  }

  parsed.sim = sim;
  return parsed;
}

/// Reads and parses a configuration file; errors carry the path.
inline ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

/// Reads a whole file (used to echo configs into run manifests).
inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace iccon
