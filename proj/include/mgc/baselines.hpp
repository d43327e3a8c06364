#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mgc/clustering.hpp"
#include "mgc/evidence_graph.hpp"

namespace mgc {

// ---------------------------------------------------------------------------
// Threshold-based agglomerative clustering of campaigns.
// ---------------------------------------------------------------------------

struct CampaignCluster {
  std::vector<std::string> campaigns;
  std::vector<NodeId> nodes;
  std::map<std::string, std::size_t> address_counts;  // messages per address

  std::size_t num_messages() const noexcept { return nodes.size(); }
  void absorb(const CampaignCluster& other);
};

/// Fraction of messages in each cluster whose address also occurs in the
/// other cluster, averaged over the two clusters. Symmetric, in [0, 1].
double overlap_fraction(const CampaignCluster& c, const CampaignCluster& other);

/// One cluster per campaign, ordered by campaign id.
std::vector<CampaignCluster> campaign_clusters(std::span<const MessageRecord> messages);

/// Starts from one cluster per campaign and repeatedly merges the pair with
/// the largest overlap strictly above `threshold`; ties go to the pair with
/// the smallest (first, second) cluster ids, where ids follow campaign-id
/// order and a merged cluster keeps the smaller id. Returns the induced
/// message clustering (node ids must be contiguous from 0).
Clustering threshold_cluster(std::span<const MessageRecord> messages, double threshold);

// ---------------------------------------------------------------------------
// Generative edge model: CRP prior over one global clustering and two
// Bernoulli channels per unordered node pair (shared campaign, shared
// address), with in-cluster and out-of-cluster rates.
// ---------------------------------------------------------------------------

struct GenerativeParams {
  double theta_campaign_in = 0.5;
  double theta_campaign_out = 0.05;
  double theta_address_in = 0.5;
  double theta_address_out = 0.05;
  double alpha = 1.0;

  /// Throws ParameterError unless every theta is in (0,1) and alpha > 0.
  void validate() const;
  friend bool operator==(const GenerativeParams&, const GenerativeParams&) = default;
};

/// Pair statistics of a clustering. "in" pairs share a cluster.
struct PairCounts {
  std::uint64_t pairs_in = 0;
  std::uint64_t pairs_out = 0;
  std::uint64_t campaign_in = 0;  // in-pairs sharing a campaign
  std::uint64_t campaign_out = 0;
  std::uint64_t address_in = 0;
  std::uint64_t address_out = 0;
};

PairCounts count_pairs(const Clustering& clustering, const CliqueIndex& index);

double generative_log_joint(const Clustering& clustering, const CliqueIndex& index,
                            const GenerativeParams& params);

/// Partial derivatives of generative_log_joint with respect to each theta.
struct ThetaGradient {
  double campaign_in = 0.0;
  double campaign_out = 0.0;
  double address_in = 0.0;
  double address_out = 0.0;
};

ThetaGradient generative_theta_gradient(const Clustering& clustering, const CliqueIndex& index,
                                        const GenerativeParams& params);

struct GenerativeFitOptions {
  std::size_t iterations = 30;
  std::size_t ascent_steps = 20;  // theta steps per iteration
  std::uint64_t seed = 1;
};

struct GenerativeFit {
  Clustering clustering;
  GenerativeParams params;
  /// Joint log likelihood before and after each theta-ascent phase.
  std::vector<std::pair<double, double>> ascent_trace;
};

/// Alternates one Gibbs sweep over per-node cluster assignments with
/// line-searched gradient ascent on logit(theta). `init.alpha` is the CRP
/// concentration and is held fixed.
GenerativeFit generative_fit(const CliqueIndex& index, const GenerativeParams& init,
                             const GenerativeFitOptions& options);

}  // namespace mgc
