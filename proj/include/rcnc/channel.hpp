#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcnc/error.hpp"
#include "rcnc/random.hpp"

namespace rcnc {

using ClientId = std::uint32_t;
using GroupId = std::uint32_t;

struct ClientProfile {
  ClientId client_id = 0;
  double success_prob = 1.0;
  bool supports_decoding = true;
  std::optional<GroupId> collocation_group;

  friend bool operator==(const ClientProfile&, const ClientProfile&) = default;
};

inline void validate(const ClientProfile& client) {
  if (!(client.success_prob > 0.0 && client.success_prob <= 1.0)) {
    throw ConfigError("client " + std::to_string(client.client_id) +
                      " has success_prob outside (0, 1]");
  }
}

// Delivery flags for one transmission, sorted by client id.
class DeliveryOutcome {
 public:
  DeliveryOutcome() = default;
  explicit DeliveryOutcome(std::vector<std::pair<ClientId, bool>> flags)
      : flags_(std::move(flags)) {
    std::sort(flags_.begin(), flags_.end());
  }

  std::size_t size() const { return flags_.size(); }
  bool contains(ClientId id) const { return find(id) != flags_.end(); }

  bool delivered(ClientId id) const {
    auto it = find(id);
    if (it == flags_.end()) {
      throw InvalidInput("client " + std::to_string(id) + " was not addressed");
    }
    return it->second;
  }

  std::size_t delivered_count() const {
    return static_cast<std::size_t>(
        std::count_if(flags_.begin(), flags_.end(), [](const auto& f) { return f.second; }));
  }

  std::span<const std::pair<ClientId, bool>> flags() const { return flags_; }

 private:
  std::vector<std::pair<ClientId, bool>>::const_iterator find(ClientId id) const {
    auto it = std::lower_bound(flags_.begin(), flags_.end(), std::make_pair(id, false));
    return (it != flags_.end() && it->first == id) ? it : flags_.end();
  }

  std::vector<std::pair<ClientId, bool>> flags_;
};

// One broadcast frame. Clients are evaluated in ascending id order; clients
// sharing a collocation group get one shared draw at the group's lowest
// success probability, taken when the group's first member is reached.
inline DeliveryOutcome transmit_broadcast(std::span<const ClientProfile> clients, Rng& rng) {
  if (clients.empty()) throw InvalidInput("broadcast needs at least one client");

  std::vector<std::size_t> order(clients.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return clients[a].client_id < clients[b].client_id;
  });

  struct GroupDraw {
    GroupId group;
    double min_prob;
    std::optional<bool> outcome;
  };
  std::vector<GroupDraw> groups;
  auto group_of = [&](GroupId g) -> GroupDraw& {
    for (auto& d : groups) {
      if (d.group == g) return d;
    }
    return groups.emplace_back(GroupDraw{g, 1.0, std::nullopt});
  };
  for (const auto& c : clients) {
    if (c.collocation_group) {
      auto& d = group_of(*c.collocation_group);
      d.min_prob = std::min(d.min_prob, c.success_prob);
    }
  }

  std::vector<std::pair<ClientId, bool>> flags;
  flags.reserve(clients.size());
  for (std::size_t idx : order) {
    const ClientProfile& c = clients[idx];
    bool ok;
    if (c.collocation_group) {
      auto& d = group_of(*c.collocation_group);
      if (!d.outcome) d.outcome = rng.bernoulli(d.min_prob);
      ok = *d.outcome;
    } else {
      ok = rng.bernoulli(c.success_prob);
    }
    flags.emplace_back(c.client_id, ok);
  }
  return DeliveryOutcome(std::move(flags));
}

inline bool transmit_unicast(const ClientProfile& client, Rng& rng) {
  return rng.bernoulli(client.success_prob);
}

}  // namespace rcnc
