#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mgc/crp_posterior.hpp"
#include "mgc/evidence_graph.hpp"

namespace mgc {

using Rng = std::mt19937_64;

/// One choice per clique of the resampled node: an existing table of that
/// clique, or kNoTable for a fresh table.
struct CandidateAssignment {
  TableId address_table = kNoTable;
  TableId campaign_table = kNoTable;

  bool all_new() const noexcept { return address_table == kNoTable && campaign_table == kNoTable; }
  friend bool operator==(const CandidateAssignment&, const CandidateAssignment&) = default;
};

struct ChainConfig {
  std::size_t burn_in_sweeps = 50;
  std::size_t thinning = 5;
  std::size_t kept_samples = 50;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ChainSample {
  Clustering clustering;
  std::size_t sweep_index = 0;

  friend bool operator==(const ChainSample&, const ChainSample&) = default;
};

/// Detaches `node` and lists every seating of it that keeps the state
/// minimal. The all-new candidate is always first.
std::vector<CandidateAssignment> enumerate_candidates(ClusteringState& state,
                                                      const CliqueIndex& index, NodeId node);

/// Sum over the node's two cliques of log_crp_clique after applying the
/// candidate. `state` must have `node` detached.
double candidate_log_weight(const ClusteringState& state, const CliqueIndex& index, NodeId node,
                            const CandidateAssignment& candidate,
                            const ConcentrationParams& params);

/// Normalized probabilities over candidates (max-shifted exponentiation).
std::vector<double> candidate_probabilities(const ClusteringState& state,
                                            const CliqueIndex& index, NodeId node,
                                            const std::vector<CandidateAssignment>& candidates,
                                            const ConcentrationParams& params);

void apply_candidate(ClusteringState& state, const CliqueIndex& index, NodeId node,
                     const CandidateAssignment& candidate);

/// Resamples the seating of one node from its full conditional.
void gibbs_step(ClusteringState& state, const CliqueIndex& index, NodeId node,
                const ConcentrationParams& params, Rng& rng);

/// Resamples nodes 0..n-1 in order.
void gibbs_sweep(ClusteringState& state, const CliqueIndex& index,
                 const ConcentrationParams& params, Rng& rng);

/// Runs a chain from the singleton state (or `warm_start`), discarding
/// burn-in and keeping every `thinning`-th sweep after it.
std::vector<ChainSample> run_chain(const CliqueIndex& index, const ConcentrationParams& params,
                                   const ChainConfig& config,
                                   std::optional<ClusteringState> warm_start = std::nullopt);

/// The clustering drawn most often; ties go to the earliest sample.
Clustering most_frequent_clustering(const std::vector<ChainSample>& samples);

}  // namespace mgc
