#pragma once

// Control plane: decoder negotiation with each client and the choice between
// coded multicast, unicast conversion, or a mix of the two.

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcnc/channel.hpp"
#include "rcnc/error.hpp"
#include "rcnc/random.hpp"

namespace rcnc {

struct PolicyConfig {
  std::size_t unicast_threshold = 10;
  // Informational only; no rule reads it.
  std::size_t rcnc_sweet_spot = 30;
  double collocation_fraction_limit = 0.5;
};

inline void validate(const PolicyConfig& policy) {
  if (policy.unicast_threshold < 1) throw ConfigError("unicast_threshold must be >= 1");
  if (!(policy.collocation_fraction_limit > 0.0 && policy.collocation_fraction_limit <= 1.0)) {
    throw ConfigError("collocation_fraction_limit must be in (0, 1]");
  }
}

enum class Mode { Rcnc, Unicast, Mixed };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Rcnc: return "rcnc";
    case Mode::Unicast: return "unicast";
    case Mode::Mixed: return "mixed";
  }
  return "?";
}

enum class DecisionReason { BelowThreshold, Collocated, NoCapability, AllCapable, PartialCapability };

inline const char* to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::BelowThreshold: return "below-threshold";
    case DecisionReason::Collocated: return "collocated";
    case DecisionReason::NoCapability: return "no-capability";
    case DecisionReason::AllCapable: return "all-capable";
    case DecisionReason::PartialCapability: return "partial-capability";
  }
  return "?";
}

struct ModeDecision {
  Mode mode = Mode::Unicast;
  std::vector<ClientId> rcnc_set;
  std::vector<ClientId> unicast_set;
  DecisionReason reason = DecisionReason::BelowThreshold;

  friend bool operator==(const ModeDecision&, const ModeDecision&) = default;
};

// Willingness of a capable client to take the decoder: 1.0 always, 0.0 never.
struct AcceptPolicy {
  double probability = 1.0;

  static AcceptPolicy always() { return {1.0}; }
  static AcceptPolicy never() { return {0.0}; }
};

struct NegotiationOutcome {
  ClientId client_id = 0;
  bool accepted = false;
  bool declared_resources_ok = false;
};

// Abstract decoder-push handshake. The resource check is the client's
// supports_decoding flag; willingness is one draw against the accept policy.
// Exactly one draw is taken per call so streams stay aligned across rosters.
inline NegotiationOutcome negotiate(const ClientProfile& client, AcceptPolicy accept, Rng& rng) {
  const bool willing = rng.bernoulli(accept.probability);
  NegotiationOutcome out;
  out.client_id = client.client_id;
  out.declared_resources_ok = client.supports_decoding;
  out.accepted = willing && out.declared_resources_ok;
  return out;
}

// Profiles as seen after negotiation: only accepted clients can decode.
inline std::vector<ClientProfile> apply_negotiation(std::span<const ClientProfile> clients,
                                                    std::span<const NegotiationOutcome> outcomes) {
  std::vector<ClientProfile> out(clients.begin(), clients.end());
  for (auto& c : out) {
    auto it = std::find_if(outcomes.begin(), outcomes.end(),
                           [&](const NegotiationOutcome& o) { return o.client_id == c.client_id; });
    c.supports_decoding = it != outcomes.end() && it->accepted;
  }
  return out;
}

namespace detail {

inline std::vector<ClientId> sorted_ids(std::span<const ClientProfile> clients) {
  std::vector<ClientId> ids;
  ids.reserve(clients.size());
  for (const auto& c : clients) ids.push_back(c.client_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace detail

// Capable clients to coded multicast, the rest to unicast. No thresholds.
inline ModeDecision partition_by_capability(std::span<const ClientProfile> clients) {
  ModeDecision d;
  for (const auto& c : clients) {
    (c.supports_decoding ? d.rcnc_set : d.unicast_set).push_back(c.client_id);
  }
  std::sort(d.rcnc_set.begin(), d.rcnc_set.end());
  std::sort(d.unicast_set.begin(), d.unicast_set.end());
  if (d.unicast_set.empty()) {
    d.mode = Mode::Rcnc;
    d.reason = DecisionReason::AllCapable;
  } else if (d.rcnc_set.empty()) {
    d.mode = Mode::Unicast;
    d.reason = DecisionReason::NoCapability;
  } else {
    d.mode = Mode::Mixed;
    d.reason = DecisionReason::PartialCapability;
  }
  return d;
}

// Rules, first match wins:
//   1. fewer than unicast_threshold clients        -> UNICAST (below-threshold)
//   2. a collocation group holds more than
//      collocation_fraction_limit of all clients   -> UNICAST (collocated)
//   3. by decode capability: all -> RCNC, none -> UNICAST, otherwise MIXED
inline ModeDecision decide_mode(std::span<const ClientProfile> clients,
                                const PolicyConfig& policy) {
  if (clients.empty()) throw InvalidInput("decide_mode needs at least one client");
  validate(policy);

  const std::size_t n = clients.size();
  if (n < policy.unicast_threshold) {
    return ModeDecision{Mode::Unicast, {}, detail::sorted_ids(clients),
                        DecisionReason::BelowThreshold};
  }

  std::map<GroupId, std::size_t> group_sizes;
  for (const auto& c : clients) {
    if (c.collocation_group) ++group_sizes[*c.collocation_group];
  }
  for (const auto& [group, size] : group_sizes) {
    if (static_cast<double>(size) > policy.collocation_fraction_limit * static_cast<double>(n)) {
      return ModeDecision{Mode::Unicast, {}, detail::sorted_ids(clients),
                          DecisionReason::Collocated};
    }
  }

  return partition_by_capability(clients);
}

}  // namespace rcnc
