#include "mgc/campaign_predictor.hpp"

#include <stdexcept>

#include "mgc/errors.hpp"

namespace mgc {

PredictorModel fit_predictor(const Clustering& clustering, std::span<const MessageRecord> messages,
                             double smoothing) {
  if (!(smoothing >= 0.0)) throw ParameterError("smoothing must be non-negative");
  if (clustering.num_nodes() != messages.size()) {
    throw std::invalid_argument("fit_predictor: clustering does not cover the training messages");
  }

  const std::size_t k = clustering.num_clusters();
  std::vector<std::map<std::string, double>> campaign_counts(k);
  std::map<std::string, std::map<ClusterLabel, double>> address_counts;
  for (const auto& m : messages) {
    if (m.node_id >= clustering.num_nodes()) {
      throw std::invalid_argument("fit_predictor: node id outside the clustering");
    }
    const ClusterLabel c = clustering[m.node_id];
    campaign_counts[c][m.campaign_id] += 1.0;
    address_counts[m.address_id][c] += 1.0;
  }

  PredictorModel model;
  model.smoothing = smoothing;
  model.campaign_given_cluster.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    double total = 0.0;
    for (auto& [campaign, count] : campaign_counts[c]) total += count + smoothing;
    for (auto& [campaign, count] : campaign_counts[c]) {
      model.campaign_given_cluster[c][campaign] = (count + smoothing) / total;
    }
  }
  for (auto& [address, counts] : address_counts) {
    double total = 0.0;
    for (auto& [c, count] : counts) total += count + smoothing;
    auto& out = model.cluster_given_address[address];
    for (auto& [c, count] : counts) out.emplace_back(c, (count + smoothing) / total);
  }
  return model;
}

CampaignDistribution predict_campaign_dist(const PredictorModel& model,
                                           const std::string& address) {
  auto it = model.cluster_given_address.find(address);
  if (it == model.cluster_given_address.end()) throw UnknownAddressError(address);
  CampaignDistribution out;
  for (const auto& [cluster, p_cluster] : it->second) {
    for (const auto& [campaign, p_campaign] : model.campaign_given_cluster[cluster]) {
      out[campaign] += p_cluster * p_campaign;
    }
  }
  return out;
}

CampaignDistribution mix_distributions(std::span<const CampaignDistribution> dists,
                                       std::span<const double> weights) {
  if (dists.size() != weights.size() || dists.empty()) {
    throw std::invalid_argument("mix_distributions: need one weight per distribution");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("mix_distributions: weights sum to zero");
  CampaignDistribution out;
  for (std::size_t k = 0; k < dists.size(); ++k) {
    for (const auto& [campaign, p] : dists[k]) out[campaign] += weights[k] / total * p;
  }
  return out;
}

CampaignDistribution posterior_predict(std::span<const ChainSample> samples,
                                       std::span<const MessageRecord> messages,
                                       const std::string& address, double smoothing) {
  return PosteriorPredictor(samples, messages, smoothing).predict(address);
}

PosteriorPredictor::PosteriorPredictor(std::span<const ChainSample> samples,
                                       std::span<const MessageRecord> messages, double smoothing) {
  if (samples.empty()) throw std::invalid_argument("posterior prediction needs at least one sample");
  models_.reserve(samples.size());
  for (const auto& s : samples) models_.push_back(fit_predictor(s, messages, smoothing));
}

PosteriorPredictor::PosteriorPredictor(std::vector<PredictorModel> models)
    : models_(std::move(models)) {
  if (models_.empty()) throw std::invalid_argument("posterior prediction needs at least one model");
}

bool PosteriorPredictor::knows(const std::string& address) const {
  return models_.front().knows(address);
}

CampaignDistribution PosteriorPredictor::predict(const std::string& address) const {
  // Running mean, so identical per-sample predictions average to themselves
  // bit for bit.
  CampaignDistribution mean;
  double k = 0.0;
  for (const auto& m : models_) {
    const auto dist = predict_campaign_dist(m, address);
    k += 1.0;
    for (const auto& [campaign, p] : dist) mean.try_emplace(campaign, 0.0);
    for (auto& [campaign, value] : mean) {
      auto it = dist.find(campaign);
      const double x = it == dist.end() ? 0.0 : it->second;
      value += (x - value) / k;
    }
  }
  return mean;
}

}  // namespace mgc
