#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgc/evidence_graph.hpp"

namespace mgc {

/// A simulated botnet world. Rates are per botnet (messages) or per address
/// (reassignments).
struct WorldConfig {
  std::size_t num_botnets = 5;
  std::size_t addresses_per_botnet = 20;
  std::size_t campaigns_per_botnet = 3;
  double campaign_sharing = 0.0;           // P(campaign also runs on a second botnet)
  double address_reassignment_rate = 0.0;  // expected moves per address per day
  double messages_per_hour = 20.0;         // per botnet
  double duration_hours = 24.0;
  double observation_fraction = 1.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError on zero botnets/addresses/campaigns or out-of-range
  /// rates and probabilities.
  void validate() const;
};

/// Interval [start, end) of trace time (seconds since trace start) during
/// which an address belonged to a botnet.
struct AddressEpoch {
  std::string address_id;
  std::size_t botnet = 0;
  double start = 0.0;
  double end = 0.0;
};

struct LabeledTrace {
  std::vector<MessageRecord> messages;  // observed only, node ids 0..n-1 in time order
  std::vector<std::size_t> truth_botnet;  // per message
  std::vector<AddressEpoch> address_epochs;
  std::size_t emitted_messages = 0;  // before observation thinning
};

/// Epoch used as timestamp origin for generated traces (2012-01-01 UTC).
inline constexpr std::int64_t kTraceEpoch = 1325376000;

/// Simulates the world: botnets hold disjoint address pools, addresses
/// migrate as a Poisson process, each botnet emits a Poisson message stream
/// drawing uniformly from its pool and its campaigns, and each message is
/// observed independently. Observation draws use a separate random stream,
/// so traces from one seed at increasing observation fractions are nested.
LabeledTrace generate_trace(const WorldConfig& config);

std::string synthetic_address(std::size_t index);
std::string synthetic_campaign(std::size_t index);

}  // namespace mgc
