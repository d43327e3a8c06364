#include "mgc/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "mgc/errors.hpp"

namespace mgc {

void WorldConfig::validate() const {
  if (num_botnets == 0) throw ConfigError("num_botnets must be positive");
  if (addresses_per_botnet == 0) throw ConfigError("addresses_per_botnet must be positive");
  if (campaigns_per_botnet == 0) throw ConfigError("campaigns_per_botnet must be positive");
  if (!(campaign_sharing >= 0.0 && campaign_sharing <= 1.0)) {
    throw ConfigError("campaign_sharing must be a probability");
  }
  if (!(address_reassignment_rate >= 0.0) || !std::isfinite(address_reassignment_rate)) {
    throw ConfigError("address_reassignment_rate must be non-negative");
  }
  if (!(messages_per_hour > 0.0) || !std::isfinite(messages_per_hour)) {
    throw ConfigError("messages_per_hour must be positive");
  }
  if (!(duration_hours > 0.0) || !std::isfinite(duration_hours)) {
    throw ConfigError("duration_hours must be positive");
  }
  if (!(observation_fraction > 0.0 && observation_fraction <= 1.0)) {
    throw ConfigError("observation_fraction must lie in (0, 1]");
  }
}

std::string synthetic_address(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "10.%zu.%zu.%zu", (index >> 16) & 255, (index >> 8) & 255,
                index & 255);
  return buf;
}

std::string synthetic_campaign(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "campaign-%03zu", index);
  return buf;
}

LabeledTrace generate_trace(const WorldConfig& config) {
  config.validate();
  const std::size_t num_botnets = config.num_botnets;
  const std::size_t num_addresses = num_botnets * config.addresses_per_botnet;
  const std::size_t num_campaigns = num_botnets * config.campaigns_per_botnet;

  std::mt19937_64 rng(config.seed);
  std::mt19937_64 observe_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::string> address_names(num_addresses);
  for (std::size_t a = 0; a < num_addresses; ++a) address_names[a] = synthetic_address(a);

  // Disjoint pools with O(1) removal.
  std::vector<std::vector<std::size_t>> pools(num_botnets);
  std::vector<std::size_t> owner(num_addresses);
  std::vector<std::size_t> position(num_addresses);
  std::vector<double> epoch_start(num_addresses, 0.0);
  for (std::size_t a = 0; a < num_addresses; ++a) {
    owner[a] = a / config.addresses_per_botnet;
    position[a] = pools[owner[a]].size();
    pools[owner[a]].push_back(a);
  }

  std::vector<std::vector<std::size_t>> campaigns(num_botnets);
  for (std::size_t c = 0; c < num_campaigns; ++c) {
    campaigns[c / config.campaigns_per_botnet].push_back(c);
  }
  if (num_botnets > 1) {
    for (std::size_t c = 0; c < num_campaigns; ++c) {
      if (unit(rng) < config.campaign_sharing) {
        const std::size_t home = c / config.campaigns_per_botnet;
        std::size_t other = std::uniform_int_distribution<std::size_t>(0, num_botnets - 2)(rng);
        if (other >= home) ++other;
        campaigns[other].push_back(c);
      }
    }
  }

  LabeledTrace trace;
  const double duration = config.duration_hours * 3600.0;
  const double emit_rate = static_cast<double>(num_botnets) * config.messages_per_hour / 3600.0;
  const double churn_rate = num_botnets > 1 ? static_cast<double>(num_addresses) *
                                                  config.address_reassignment_rate / 86400.0
                                            : 0.0;
  const double total_rate = emit_rate + churn_rate;
  std::exponential_distribution<double> gap(total_rate);

  double t = 0.0;
  while (true) {
    t += gap(rng);
    if (t >= duration) break;
    if (unit(rng) * total_rate < churn_rate) {
      const std::size_t a = std::uniform_int_distribution<std::size_t>(0, num_addresses - 1)(rng);
      const std::size_t from = owner[a];
      std::size_t to = std::uniform_int_distribution<std::size_t>(0, num_botnets - 2)(rng);
      if (to >= from) ++to;

      auto& old_pool = pools[from];
      const std::size_t moved = old_pool.back();
      old_pool[position[a]] = moved;
      position[moved] = position[a];
      old_pool.pop_back();
      position[a] = pools[to].size();
      pools[to].push_back(a);
      owner[a] = to;

      trace.address_epochs.push_back({address_names[a], from, epoch_start[a], t});
      epoch_start[a] = t;
      continue;
    }

    const std::size_t b = std::uniform_int_distribution<std::size_t>(0, num_botnets - 1)(rng);
    if (pools[b].empty()) continue;
    const std::size_t a =
        pools[b][std::uniform_int_distribution<std::size_t>(0, pools[b].size() - 1)(rng)];
    const std::size_t c =
        campaigns[b][std::uniform_int_distribution<std::size_t>(0, campaigns[b].size() - 1)(rng)];
    ++trace.emitted_messages;
    if (unit(observe_rng) >= config.observation_fraction) continue;

    MessageRecord record;
    record.node_id = static_cast<NodeId>(trace.messages.size());
    record.address_id = address_names[a];
    record.campaign_id = synthetic_campaign(c);
    record.timestamp = kTraceEpoch + static_cast<std::int64_t>(std::floor(t));
    trace.messages.push_back(std::move(record));
    trace.truth_botnet.push_back(b);
  }

  for (std::size_t a = 0; a < num_addresses; ++a) {
    trace.address_epochs.push_back({address_names[a], owner[a], epoch_start[a], duration});
  }
  return trace;
}

}  // namespace mgc
