#pragma once

// Event loops for the three delivery protocols between one access point and N
// clients, with airtime accounting.
//
// Airtime is derived from integer counters at the end of a run:
//   airtime = data_tx * t_data + ack_count * t_ack + backoff_slots * t_slot
// ACK frames are never lost.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcnc/channel.hpp"
#include "rcnc/codec.hpp"
#include "rcnc/error.hpp"
#include "rcnc/policy.hpp"
#include "rcnc/random.hpp"

namespace rcnc {

struct AirtimeModel {
  double t_data = 1.0;
  double t_ack = 0.05;
  double t_slot = 0.01;
  std::uint32_t cw_min = 16;
  std::uint32_t cw_max = 1024;

  double cost(std::uint64_t data_tx, std::uint64_t acks, std::uint64_t slots) const {
    return static_cast<double>(data_tx) * t_data + static_cast<double>(acks) * t_ack +
           static_cast<double>(slots) * t_slot;
  }
};

inline void validate(const AirtimeModel& a) {
  if (!(a.t_data > 0) || !(a.t_ack > 0) || !(a.t_slot > 0)) {
    throw ConfigError("airtime costs t_data, t_ack and t_slot must be positive");
  }
  if (a.cw_min == 0 || a.cw_max < a.cw_min) throw ConfigError("need 0 < cw_min <= cw_max");
  std::uint64_t cw = a.cw_min;
  while (cw < a.cw_max) cw *= 2;
  if (cw != a.cw_max) throw ConfigError("cw_max must be cw_min times a power of two");
}

enum class Protocol { Rcnc, Unicast, Plain, Mixed };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Rcnc: return "rcnc";
    case Protocol::Unicast: return "unicast";
    case Protocol::Plain: return "plain";
    case Protocol::Mixed: return "mixed";
  }
  return "?";
}

struct RunMetrics {
  Protocol mode = Protocol::Rcnc;
  double airtime_units = 0.0;
  std::uint64_t data_tx = 0;
  std::uint64_t ack_count = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t backoff_slots = 0;
  double delivery_ratio = 0.0;
  bool completed = false;
  // Filled in by the caller that owns the seed; engines only see a stream.
  std::uint64_t seed = 0;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct SimLimits {
  // Cap on data/coded transmissions in a single run.
  std::uint64_t max_transmissions = 50'000'000;
};

namespace detail {

inline std::vector<ClientProfile> sorted_roster(std::span<const ClientProfile> clients) {
  std::vector<ClientProfile> out(clients.begin(), clients.end());
  std::sort(out.begin(), out.end(), [](const ClientProfile& a, const ClientProfile& b) {
    return a.client_id < b.client_id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    validate(out[i]);
    if (i > 0 && out[i].client_id == out[i - 1].client_id) {
      throw ConfigError("duplicate client id " + std::to_string(out[i].client_id));
    }
  }
  return out;
}

inline void check_cap(std::uint64_t data_tx, const SimLimits& limits, const char* what) {
  if (data_tx >= limits.max_transmissions) {
    throw EventCapExceeded(std::string(what) + " run hit the cap of " +
                           std::to_string(limits.max_transmissions) + " transmissions");
  }
}

}  // namespace detail

// Coded multicast. Each round broadcasts one fresh coded packet to the clients
// that have not finished; a client ACKs once when its decoder completes and
// then leaves the run.
inline RunMetrics run_rcnc(const Generation& generation, std::span<const ClientProfile> clients,
                           const AirtimeModel& airtime, Rng& rng, const SimLimits& limits = {}) {
  if (clients.empty()) throw ConfigError("rcnc run needs at least one client");
  std::vector<ClientProfile> pending = detail::sorted_roster(clients);
  for (const auto& c : pending) {
    if (!c.supports_decoding) {
      throw ConfigError("client " + std::to_string(c.client_id) +
                        " cannot decode and must not be in an rcnc run");
    }
  }

  std::vector<Decoder> decoders;
  decoders.reserve(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) decoders.emplace_back(generation);

  RunMetrics m;
  m.mode = Protocol::Rcnc;
  while (!pending.empty()) {
    detail::check_cap(m.data_tx, limits, "rcnc");
    const CodedPacket packet = next_coded_packet(generation, rng);
    ++m.data_tx;
    const DeliveryOutcome outcome = transmit_broadcast(pending, rng);

    std::size_t keep = 0;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      bool done = false;
      if (outcome.delivered(pending[i].client_id) &&
          decoders[i].receive(packet) == ReceiveResult::Complete) {
        const Bytes recovered = decoders[i].recover(generation.original_length());
        if (!std::equal(recovered.begin(), recovered.end(), generation.source().begin())) {
          throw ProtocolError("client " + std::to_string(pending[i].client_id) +
                              " decoded a block that differs from the source");
        }
        ++m.ack_count;
        done = true;
      }
      if (!done) {
        if (keep != i) {
          pending[keep] = std::move(pending[i]);
          decoders[keep] = std::move(decoders[i]);
        }
        ++keep;
      }
    }
    pending.resize(keep);
    decoders.erase(decoders.begin() + static_cast<std::ptrdiff_t>(keep), decoders.end());
  }

  m.delivery_ratio = 1.0;
  m.completed = true;
  m.airtime_units = airtime.cost(m.data_tx, m.ack_count, m.backoff_slots);
  return m;
}

// Multicast-to-unicast conversion: every client gets every source segment as a
// plain stop-and-wait unicast frame. After a loss the AP waits a uniform number
// of slots in [0, CW) and doubles CW (capped at cw_max) before resending; CW
// returns to cw_min once the frame gets through.
inline RunMetrics run_unicast_conversion(const Generation& generation,
                                         std::span<const ClientProfile> clients,
                                         const AirtimeModel& airtime, Rng& rng,
                                         const SimLimits& limits = {}) {
  if (clients.empty()) throw ConfigError("unicast run needs at least one client");
  const std::vector<ClientProfile> roster = detail::sorted_roster(clients);

  RunMetrics m;
  m.mode = Protocol::Unicast;
  for (const auto& client : roster) {
    for (std::size_t seg = 0; seg < generation.k(); ++seg) {
      std::uint64_t cw = airtime.cw_min;
      while (true) {
        detail::check_cap(m.data_tx, limits, "unicast");
        ++m.data_tx;
        if (transmit_unicast(client, rng)) {
          ++m.ack_count;
          break;
        }
        m.backoff_slots += rng.below(cw);
        cw = std::min<std::uint64_t>(cw * 2, airtime.cw_max);
        ++m.retransmissions;
      }
    }
  }

  m.delivery_ratio = 1.0;
  m.completed = true;
  m.airtime_units = airtime.cost(m.data_tx, m.ack_count, m.backoff_slots);
  return m;
}

// Each source segment broadcast exactly once, no feedback.
inline RunMetrics run_plain_multicast(const Generation& generation,
                                      std::span<const ClientProfile> clients,
                                      const AirtimeModel& airtime, Rng& rng) {
  if (clients.empty()) throw ConfigError("plain multicast run needs at least one client");
  const std::vector<ClientProfile> roster = detail::sorted_roster(clients);

  RunMetrics m;
  m.mode = Protocol::Plain;
  std::uint64_t delivered = 0;
  for (std::size_t seg = 0; seg < generation.k(); ++seg) {
    ++m.data_tx;
    delivered += transmit_broadcast(roster, rng).delivered_count();
  }
  const std::uint64_t pairs = roster.size() * generation.k();
  m.delivery_ratio = static_cast<double>(delivered) / static_cast<double>(pairs);
  m.completed = delivered == pairs;
  m.airtime_units = airtime.cost(m.data_tx, m.ack_count, m.backoff_slots);
  return m;
}

// Sub-streams used by run_mixed: the first draw seeds the rcnc phase, the
// second the unicast phase. Both are always drawn.
struct MixedSeeds {
  std::uint64_t rcnc;
  std::uint64_t unicast;
};

inline MixedSeeds draw_mixed_seeds(Rng& rng) {
  const std::uint64_t a = rng.next();
  const std::uint64_t b = rng.next();
  return {a, b};
}

// Coded multicast to decision.rcnc_set, then unicast conversion to
// decision.unicast_set, serialized on the medium. Counters add up.
inline RunMetrics run_mixed(const Generation& generation, std::span<const ClientProfile> clients,
                            const AirtimeModel& airtime, Rng& rng, const ModeDecision& decision,
                            const SimLimits& limits = {}) {
  if (clients.empty()) throw ConfigError("mixed run needs at least one client");
  std::vector<ClientProfile> rcnc_clients;
  std::vector<ClientProfile> unicast_clients;
  for (const auto& c : clients) {
    const bool in_rcnc = std::find(decision.rcnc_set.begin(), decision.rcnc_set.end(),
                                   c.client_id) != decision.rcnc_set.end();
    const bool in_unicast = std::find(decision.unicast_set.begin(), decision.unicast_set.end(),
                                      c.client_id) != decision.unicast_set.end();
    if (in_rcnc == in_unicast) {
      throw ConfigError("decision must place client " + std::to_string(c.client_id) +
                        " in exactly one set");
    }
    (in_rcnc ? rcnc_clients : unicast_clients).push_back(c);
  }
  if (rcnc_clients.size() + unicast_clients.size() !=
      decision.rcnc_set.size() + decision.unicast_set.size()) {
    throw ConfigError("decision names clients that are not in the roster");
  }

  const MixedSeeds seeds = draw_mixed_seeds(rng);
  RunMetrics total;
  total.mode = Protocol::Mixed;
  total.completed = true;
  std::uint64_t pairs = 0;
  double delivered = 0.0;
  auto add = [&](const RunMetrics& part, std::size_t n) {
    total.data_tx += part.data_tx;
    total.ack_count += part.ack_count;
    total.retransmissions += part.retransmissions;
    total.backoff_slots += part.backoff_slots;
    total.completed = total.completed && part.completed;
    pairs += n * generation.k();
    delivered += part.delivery_ratio * static_cast<double>(n * generation.k());
  };
  if (!rcnc_clients.empty()) {
    Rng sub(seeds.rcnc);
    add(run_rcnc(generation, rcnc_clients, airtime, sub, limits), rcnc_clients.size());
  }
  if (!unicast_clients.empty()) {
    Rng sub(seeds.unicast);
    add(run_unicast_conversion(generation, unicast_clients, airtime, sub, limits),
        unicast_clients.size());
  }
  total.delivery_ratio = delivered / static_cast<double>(pairs);
  total.airtime_units = airtime.cost(total.data_tx, total.ack_count, total.backoff_slots);
  return total;
}

}  // namespace rcnc
