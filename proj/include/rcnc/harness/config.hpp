#pragma once

// Experiment configuration and its flat key=value text form.
//
//   # comment
//   k=32
//   p-list=0.3,0.5,0.8
//   modes=rcnc,unicast
//
// Keys are the long CLI flag names without the leading dashes; underscores are
// accepted in place of hyphens.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rcnc/error.hpp"
#include "rcnc/policy.hpp"
#include "rcnc/protocol.hpp"

namespace rcnc::harness {

enum class SweepMode { Rcnc, Unicast, Plain, Mixed, Auto };

inline const char* to_string(SweepMode m) {
  switch (m) {
    case SweepMode::Rcnc: return "rcnc";
    case SweepMode::Unicast: return "unicast";
    case SweepMode::Plain: return "plain";
    case SweepMode::Mixed: return "mixed";
    case SweepMode::Auto: return "auto";
  }
  return "?";
}

inline SweepMode parse_mode(std::string_view s) {
  for (auto m : {SweepMode::Rcnc, SweepMode::Unicast, SweepMode::Plain, SweepMode::Mixed,
                 SweepMode::Auto}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

struct ExperimentConfig {
  std::vector<SweepMode> modes{SweepMode::Rcnc, SweepMode::Unicast};
  std::vector<std::size_t> n_clients_list{2, 5, 10, 20, 40};
  std::vector<double> p_list{0.5};
  std::size_t k = 32;
  std::size_t segment_size = 32;
  std::size_t runs_per_point = 500;
  std::uint64_t master_seed = 1;
  AirtimeModel airtime;
  PolicyConfig policy;
  // Share of each roster that can host the decoder (mixed and auto modes).
  double capability_fraction = 1.0;
  // Probability a capable client accepts the decoder during negotiation (auto mode).
  double accept_prob = 1.0;
  // Share of each roster placed in one collocation group; 0 disables collocation.
  double collocation_fraction = 0.0;
  SimLimits limits;
};

inline void validate(const ExperimentConfig& c) {
  if (c.modes.empty()) throw ConfigError("modes must not be empty");
  if (c.n_clients_list.empty()) throw ConfigError("n-list must not be empty");
  if (c.p_list.empty()) throw ConfigError("p-list must not be empty");
  for (auto n : c.n_clients_list) {
    if (n < 1) throw ConfigError("every client count in n-list must be >= 1");
  }
  for (auto p : c.p_list) {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("every p in p-list must be in (0, 1]");
  }
  if (c.k < 1) throw ConfigError("k must be >= 1");
  if (c.segment_size < 1) throw ConfigError("segment-size must be >= 1");
  if (c.runs_per_point < 1) throw ConfigError("runs must be >= 1");
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
  };
  unit(c.capability_fraction, "capability-fraction");
  unit(c.accept_prob, "accept-prob");
  unit(c.collocation_fraction, "collocation-fraction");
  if (c.limits.max_transmissions < 1) throw ConfigError("max-transmissions must be >= 1");
  validate(c.airtime);
  validate(c.policy);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

template <typename T>
std::vector<T> parse_number_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (auto item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

}  // namespace detail

inline std::string canonical_key(std::string_view key) {
  std::string k(detail::trim(key));
  if (k.rfind("--", 0) == 0) k.erase(0, 2);
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

// Every key understood by apply_setting, in canonical form.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "seed",          "k",          "segment-size",       "p-list",
      "n-list",        "modes",      "runs",               "t-data",
      "t-ack",         "t-slot",     "cw-min",             "cw-max",
      "unicast-threshold", "rcnc-sweet-spot", "collocation-fraction-limit",
      "capability-fraction", "accept-prob", "collocation-fraction", "max-transmissions"};
  return keys;
}

inline void apply_setting(ExperimentConfig& c, std::string_view raw_key, std::string_view value) {
  using detail::parse_number;
  using detail::parse_number_list;
  const std::string key = canonical_key(raw_key);
  if (key == "seed") {
    c.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "k") {
    c.k = parse_number<std::size_t>(key, value);
  } else if (key == "segment-size") {
    c.segment_size = parse_number<std::size_t>(key, value);
  } else if (key == "p-list") {
    c.p_list = parse_number_list<double>(key, value);
  } else if (key == "n-list") {
    c.n_clients_list = parse_number_list<std::size_t>(key, value);
  } else if (key == "modes") {
    c.modes.clear();
    for (auto item : detail::split_list(value)) c.modes.push_back(parse_mode(item));
  } else if (key == "runs") {
    c.runs_per_point = parse_number<std::size_t>(key, value);
  } else if (key == "t-data") {
    c.airtime.t_data = parse_number<double>(key, value);
  } else if (key == "t-ack") {
    c.airtime.t_ack = parse_number<double>(key, value);
  } else if (key == "t-slot") {
    c.airtime.t_slot = parse_number<double>(key, value);
  } else if (key == "cw-min") {
    c.airtime.cw_min = parse_number<std::uint32_t>(key, value);
  } else if (key == "cw-max") {
    c.airtime.cw_max = parse_number<std::uint32_t>(key, value);
  } else if (key == "unicast-threshold") {
    c.policy.unicast_threshold = parse_number<std::size_t>(key, value);
  } else if (key == "rcnc-sweet-spot") {
    c.policy.rcnc_sweet_spot = parse_number<std::size_t>(key, value);
  } else if (key == "collocation-fraction-limit") {
    c.policy.collocation_fraction_limit = parse_number<double>(key, value);
  } else if (key == "capability-fraction") {
    c.capability_fraction = parse_number<double>(key, value);
  } else if (key == "accept-prob") {
    c.accept_prob = parse_number<double>(key, value);
  } else if (key == "collocation-fraction") {
    c.collocation_fraction = parse_number<double>(key, value);
  } else if (key == "max-transmissions") {
    c.limits.max_transmissions = parse_number<std::uint64_t>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(raw_key) + "'");
  }
}

inline void apply_config_text(ExperimentConfig& c, std::string_view text) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(c, view.substr(0, eq), view.substr(eq + 1));
  }
}

inline void apply_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(c, text.str());
}

}  // namespace rcnc::harness
