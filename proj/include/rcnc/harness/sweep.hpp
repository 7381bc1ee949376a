#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rcnc/channel.hpp"
#include "rcnc/codec.hpp"
#include "rcnc/harness/config.hpp"
#include "rcnc/policy.hpp"
#include "rcnc/protocol.hpp"
#include "rcnc/random.hpp"

namespace rcnc::harness {

struct SweepRow {
  std::string mode;
  std::size_t n_clients = 0;
  double p = 0.0;
  std::size_t k = 0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  double airtime_units = 0.0;
  std::uint64_t data_tx = 0;
  std::uint64_t ack_count = 0;
  std::uint64_t retransmissions = 0;
  double delivery_ratio = 0.0;
  bool completed = false;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// FNV-1a over "master|mode|n|p|run", p printed with %.17g.
inline std::uint64_t derive_seed(std::uint64_t master_seed, SweepMode mode, std::size_t n,
                                 double p, std::size_t run_index) {
  char p_text[40];
  std::snprintf(p_text, sizeof p_text, "%.17g", p);
  const std::string key = std::to_string(master_seed) + "|" + to_string(mode) + "|" +
                          std::to_string(n) + "|" + p_text + "|" + std::to_string(run_index);
  return fnv1a64(key);
}

// Clients 0..n-1 with success probability p. round(capability_fraction * n)
// randomly chosen clients can decode; the lowest round(collocation_fraction * n)
// ids share collocation group 0.
inline std::vector<ClientProfile> build_roster(std::size_t n, double p, double capability_fraction,
                                               double collocation_fraction, Rng& rng) {
  std::vector<ClientProfile> roster(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(std::span<std::size_t>(order), rng);
  const auto capable = static_cast<std::size_t>(std::llround(capability_fraction * double(n)));
  const auto collocated = static_cast<std::size_t>(std::llround(collocation_fraction * double(n)));
  for (std::size_t i = 0; i < n; ++i) {
    roster[i].client_id = static_cast<ClientId>(i);
    roster[i].success_prob = p;
    roster[i].supports_decoding = false;
    if (i < collocated) roster[i].collocation_group = 0;
  }
  for (std::size_t i = 0; i < capable; ++i) roster[order[i]].supports_decoding = true;
  return roster;
}

// Everything a single run starts from. The stream has already been used to
// draw the generation payload and the roster.
struct RunSetup {
  SweepMode mode;
  std::size_t n_clients;
  double p;
  std::size_t run_index;
  std::uint64_t seed;
  Generation generation;
  std::vector<ClientProfile> roster;
  Rng rng;
};

inline RunSetup prepare_run(const ExperimentConfig& config, SweepMode mode, std::size_t n, double p,
                            std::size_t run_index) {
  const std::uint64_t seed = derive_seed(config.master_seed, mode, n, p, run_index);
  Rng rng(seed);
  Bytes data(config.k * config.segment_size);
  rng.fill(data);
  Generation generation =
      make_generation(data, config.k, static_cast<GenerationId>(run_index));
  auto roster =
      build_roster(n, p, config.capability_fraction, config.collocation_fraction, rng);
  if (mode == SweepMode::Rcnc) {
    for (auto& c : roster) c.supports_decoding = true;
  }
  return RunSetup{mode, n, p, run_index, seed, std::move(generation), std::move(roster), rng};
}

struct AutoResolution {
  std::vector<NegotiationOutcome> outcomes;
  std::vector<ClientProfile> effective;
  ModeDecision decision;
};

// Negotiates with each client in roster order, then picks the mode.
inline AutoResolution resolve_auto(std::span<const ClientProfile> roster,
                                   const ExperimentConfig& config, Rng& rng) {
  AutoResolution r;
  for (const auto& c : roster) {
    r.outcomes.push_back(negotiate(c, AcceptPolicy{config.accept_prob}, rng));
  }
  r.effective = apply_negotiation(roster, r.outcomes);
  r.decision = decide_mode(r.effective, config.policy);
  return r;
}

inline std::string auto_label(Mode decided) { return std::string("auto:") + to_string(decided); }

inline SweepRow execute_run(RunSetup setup, const ExperimentConfig& config) {
  RunMetrics m;
  std::string label = to_string(setup.mode);
  const auto& gen = setup.generation;
  switch (setup.mode) {
    case SweepMode::Rcnc:
      m = run_rcnc(gen, setup.roster, config.airtime, setup.rng, config.limits);
      break;
    case SweepMode::Unicast:
      m = run_unicast_conversion(gen, setup.roster, config.airtime, setup.rng, config.limits);
      break;
    case SweepMode::Plain:
      m = run_plain_multicast(gen, setup.roster, config.airtime, setup.rng);
      break;
    case SweepMode::Mixed:
      m = run_mixed(gen, setup.roster, config.airtime, setup.rng,
                    partition_by_capability(setup.roster), config.limits);
      break;
    case SweepMode::Auto: {
      const AutoResolution res = resolve_auto(setup.roster, config, setup.rng);
      label = auto_label(res.decision.mode);
      switch (res.decision.mode) {
        case Mode::Rcnc:
          m = run_rcnc(gen, res.effective, config.airtime, setup.rng, config.limits);
          break;
        case Mode::Unicast:
          m = run_unicast_conversion(gen, res.effective, config.airtime, setup.rng,
                                     config.limits);
          break;
        case Mode::Mixed:
          m = run_mixed(gen, res.effective, config.airtime, setup.rng, res.decision,
                        config.limits);
          break;
      }
      break;
    }
  }
  m.seed = setup.seed;

  SweepRow row;
  row.mode = std::move(label);
  row.n_clients = setup.n_clients;
  row.p = setup.p;
  row.k = gen.k();
  row.run_index = setup.run_index;
  row.seed = m.seed;
  row.airtime_units = m.airtime_units;
  row.data_tx = m.data_tx;
  row.ack_count = m.ack_count;
  row.retransmissions = m.retransmissions;
  row.delivery_ratio = m.delivery_ratio;
  row.completed = m.completed;
  return row;
}

inline SweepRow run_point(const ExperimentConfig& config, SweepMode mode, std::size_t n, double p,
                          std::size_t run_index) {
  return execute_run(prepare_run(config, mode, n, p, run_index), config);
}

// Rows in grid order (mode, then N, then p), run index innermost.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  validate(config);
  std::vector<SweepRow> rows;
  rows.reserve(config.modes.size() * config.n_clients_list.size() * config.p_list.size() *
               config.runs_per_point);
  for (auto mode : config.modes) {
    for (auto n : config.n_clients_list) {
      for (auto p : config.p_list) {
        for (std::size_t r = 0; r < config.runs_per_point; ++r) {
          rows.push_back(run_point(config, mode, n, p, r));
        }
      }
    }
  }
  return rows;
}

}  // namespace rcnc::harness
