#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgc/evidence_graph.hpp"
#include "mgc/gibbs_sampler.hpp"

namespace mgc {

/// Campaign id -> probability. Ordered so iteration is deterministic.
using CampaignDistribution = std::map<std::string, double>;

/// Multinomials estimated from one clustering of the training messages:
/// P(campaign | cluster) and P(cluster | address).
struct PredictorModel {
  std::vector<CampaignDistribution> campaign_given_cluster;
  std::map<std::string, std::vector<std::pair<ClusterLabel, double>>> cluster_given_address;
  double smoothing = 0.0;

  bool knows(const std::string& address) const {
    return cluster_given_address.contains(address);
  }
};

/// Counts campaigns per cluster and clusters per address. `smoothing` is
/// added to every observed (cluster, campaign) and (address, cluster) count;
/// unobserved combinations keep probability 0.
PredictorModel fit_predictor(const Clustering& clustering, std::span<const MessageRecord> messages,
                             double smoothing = 0.0);
inline PredictorModel fit_predictor(const ChainSample& sample,
                                    std::span<const MessageRecord> messages,
                                    double smoothing = 0.0) {
  return fit_predictor(sample.clustering, messages, smoothing);
}

/// P(s|a) = sum_c P(s|c) P(c|a). Throws UnknownAddressError for addresses
/// absent from training.
CampaignDistribution predict_campaign_dist(const PredictorModel& model, const std::string& address);

/// Uniform average of per-sample predictions, each sample refit on its own.
CampaignDistribution posterior_predict(std::span<const ChainSample> samples,
                                       std::span<const MessageRecord> messages,
                                       const std::string& address, double smoothing = 0.0);

/// Chain averaging over a set of already-fitted models.
class PosteriorPredictor {
 public:
  PosteriorPredictor(std::span<const ChainSample> samples, std::span<const MessageRecord> messages,
                     double smoothing = 0.0);
  explicit PosteriorPredictor(std::vector<PredictorModel> models);

  bool knows(const std::string& address) const;
  CampaignDistribution predict(const std::string& address) const;
  std::size_t num_models() const noexcept { return models_.size(); }

 private:
  std::vector<PredictorModel> models_;
};

/// Weighted mixture of distributions; weights need not be normalized.
CampaignDistribution mix_distributions(std::span<const CampaignDistribution> dists,
                                       std::span<const double> weights);

}  // namespace mgc
