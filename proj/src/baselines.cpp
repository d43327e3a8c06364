#include "mgc/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "mgc/crp_posterior.hpp"
#include "mgc/errors.hpp"

namespace mgc {

void CampaignCluster::absorb(const CampaignCluster& other) {
  campaigns.insert(campaigns.end(), other.campaigns.begin(), other.campaigns.end());
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  for (const auto& [address, count] : other.address_counts) address_counts[address] += count;
}

namespace {

double covered_messages(const CampaignCluster& c, const CampaignCluster& other) {
  double covered = 0.0;
  for (const auto& [address, count] : c.address_counts) {
    if (other.address_counts.contains(address)) covered += static_cast<double>(count);
  }
  return covered;
}

}  // namespace

double overlap_fraction(const CampaignCluster& c, const CampaignCluster& other) {
  if (c.num_messages() == 0 || other.num_messages() == 0) {
    throw std::invalid_argument("overlap_fraction: clusters must be non-empty");
  }
  return covered_messages(c, other) / (2.0 * static_cast<double>(c.num_messages())) +
         covered_messages(other, c) / (2.0 * static_cast<double>(other.num_messages()));
}

std::vector<CampaignCluster> campaign_clusters(std::span<const MessageRecord> messages) {
  std::map<std::string, CampaignCluster> by_campaign;
  for (const auto& m : messages) {
    auto& cluster = by_campaign[m.campaign_id];
    if (cluster.campaigns.empty()) cluster.campaigns.push_back(m.campaign_id);
    cluster.nodes.push_back(m.node_id);
    ++cluster.address_counts[m.address_id];
  }
  std::vector<CampaignCluster> out;
  out.reserve(by_campaign.size());
  for (auto& [id, cluster] : by_campaign) {
    std::sort(cluster.nodes.begin(), cluster.nodes.end());
    out.push_back(std::move(cluster));
  }
  return out;
}

Clustering threshold_cluster(std::span<const MessageRecord> messages, double threshold) {
  auto clusters = campaign_clusters(messages);
  const std::size_t k = clusters.size();
  std::vector<bool> active(k, true);
  std::vector<std::vector<double>> overlap(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      overlap[i][j] = overlap_fraction(clusters[i], clusters[j]);
    }
  }

  while (true) {
    std::size_t best_i = k;
    std::size_t best_j = k;
    double best = threshold;
    for (std::size_t i = 0; i < k; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < k; ++j) {
        if (active[j] && overlap[i][j] > best) {
          best = overlap[i][j];
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i == k) break;
    clusters[best_i].absorb(clusters[best_j]);
    active[best_j] = false;
    for (std::size_t other = 0; other < k; ++other) {
      if (!active[other] || other == best_i) continue;
      const double v = overlap_fraction(clusters[best_i], clusters[other]);
      if (other < best_i) {
        overlap[other][best_i] = v;
      } else {
        overlap[best_i][other] = v;
      }
    }
  }

  std::vector<std::int64_t> labels(messages.size(), -1);
  for (std::size_t c = 0; c < k; ++c) {
    if (!active[c]) continue;
    for (NodeId node : clusters[c].nodes) {
      if (node >= labels.size()) throw DataError("threshold_cluster: node ids must be contiguous");
      labels[node] = static_cast<std::int64_t>(c);
    }
  }
  return Clustering::from_labels(labels);
}

// ---------------------------------------------------------------------------

void GenerativeParams::validate() const {
  for (double theta : {theta_campaign_in, theta_campaign_out, theta_address_in, theta_address_out}) {
    if (!(theta > 0.0 && theta < 1.0)) {
      throw ParameterError("generative model: every theta must lie strictly inside (0,1)");
    }
  }
  if (!(alpha > 0.0)) throw ParameterError("generative model: alpha must be positive");
}

namespace {

std::uint64_t choose2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

double bernoulli_channel(double successes, double trials, double theta) {
  return successes * std::log(theta) + (trials - successes) * std::log1p(-theta);
}

double channel_derivative(double successes, double trials, double theta) {
  return successes / theta - (trials - successes) / (1.0 - theta);
}

}  // namespace

PairCounts count_pairs(const Clustering& clustering, const CliqueIndex& index) {
  if (clustering.num_nodes() != index.num_nodes()) {
    throw std::invalid_argument("count_pairs: clustering does not match the graph");
  }
  PairCounts counts;
  std::map<std::pair<ClusterLabel, CliqueId>, std::uint64_t> joint;
  for (NodeId node = 0; node < index.num_nodes(); ++node) {
    for (CliqueId q : index.cliques_of(node)) ++joint[{clustering[node], q}];
  }
  for (auto s : clustering.sizes()) counts.pairs_in += choose2(s);
  counts.pairs_out = choose2(index.num_nodes()) - counts.pairs_in;

  std::uint64_t campaign_total = 0;
  std::uint64_t address_total = 0;
  for (const auto& clique : index.cliques()) {
    (clique.kind == CliqueKind::kCampaign ? campaign_total : address_total) +=
        choose2(clique.members.size());
  }
  for (const auto& [key, count] : joint) {
    (index.clique(key.second).kind == CliqueKind::kCampaign ? counts.campaign_in
                                                             : counts.address_in) += choose2(count);
  }
  counts.campaign_out = campaign_total - counts.campaign_in;
  counts.address_out = address_total - counts.address_in;
  return counts;
}

namespace {

double likelihood_from_counts(const PairCounts& c, const GenerativeParams& p) {
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  return bernoulli_channel(d(c.campaign_in), d(c.pairs_in), p.theta_campaign_in) +
         bernoulli_channel(d(c.campaign_out), d(c.pairs_out), p.theta_campaign_out) +
         bernoulli_channel(d(c.address_in), d(c.pairs_in), p.theta_address_in) +
         bernoulli_channel(d(c.address_out), d(c.pairs_out), p.theta_address_out);
}

}  // namespace

double generative_log_joint(const Clustering& clustering, const CliqueIndex& index,
                            const GenerativeParams& params) {
  params.validate();
  const auto counts = count_pairs(clustering, index);
  const auto sizes = clustering.sizes();
  return log_crp_clique(sizes, params.alpha) + likelihood_from_counts(counts, params);
}

ThetaGradient generative_theta_gradient(const Clustering& clustering, const CliqueIndex& index,
                                        const GenerativeParams& params) {
  params.validate();
  const auto c = count_pairs(clustering, index);
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  return ThetaGradient{
      channel_derivative(d(c.campaign_in), d(c.pairs_in), params.theta_campaign_in),
      channel_derivative(d(c.campaign_out), d(c.pairs_out), params.theta_campaign_out),
      channel_derivative(d(c.address_in), d(c.pairs_in), params.theta_address_in),
      channel_derivative(d(c.address_out), d(c.pairs_out), params.theta_address_out),
  };
}

namespace {

constexpr double kLogitBound = 25.0;

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }
double logit(double theta) { return std::log(theta) - std::log1p(-theta); }

// Per-node Gibbs over global cluster assignments with per-cluster campaign
// and address counts.
class GenerativeSampler {
 public:
  GenerativeSampler(const CliqueIndex& index) : index_(index) {
    const std::size_t n = index.num_nodes();
    assignment_.resize(n);
    for (NodeId node = 0; node < n; ++node) {
      const std::uint32_t c = open_cluster();
      add(node, c);
    }
  }

  void sweep(const GenerativeParams& p, std::mt19937_64& rng) {
    const double campaign_hit = std::log(p.theta_campaign_in) - std::log(p.theta_campaign_out);
    const double campaign_miss = std::log1p(-p.theta_campaign_in) - std::log1p(-p.theta_campaign_out);
    const double address_hit = std::log(p.theta_address_in) - std::log(p.theta_address_out);
    const double address_miss = std::log1p(-p.theta_address_in) - std::log1p(-p.theta_address_out);
    const double log_alpha = std::log(p.alpha);

    std::vector<std::uint32_t> options;
    std::vector<double> weights;
    for (NodeId node = 0; node < index_.num_nodes(); ++node) {
      remove(node);
      const CliqueId qa = index_.clique_of(node, CliqueKind::kAddress);
      const CliqueId qs = index_.clique_of(node, CliqueKind::kCampaign);
      options.clear();
      weights.clear();
      for (std::uint32_t c = 0; c < clusters_.size(); ++c) {
        const auto& cluster = clusters_[c];
        if (cluster.size == 0) continue;
        const double m = static_cast<double>(cluster.size);
        const double shared_s = lookup(cluster.clique_counts, qs);
        const double shared_a = lookup(cluster.clique_counts, qa);
        options.push_back(c);
        weights.push_back(std::log(m) + shared_s * campaign_hit + (m - shared_s) * campaign_miss +
                          shared_a * address_hit + (m - shared_a) * address_miss);
      }
      options.push_back(kNewCluster);
      weights.push_back(log_alpha);

      const double max = *std::max_element(weights.begin(), weights.end());
      double total = 0.0;
      for (double& w : weights) total += (w = std::exp(w - max));
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      std::size_t pick = options.size() - 1;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        if (u < weights[k]) {
          pick = k;
          break;
        }
        u -= weights[k];
      }
      const std::uint32_t target = options[pick] == kNewCluster ? open_cluster() : options[pick];
      add(node, target);
    }
  }

  Clustering clustering() const {
    std::vector<std::int64_t> labels(assignment_.begin(), assignment_.end());
    return Clustering::from_labels(labels);
  }

 private:
  static constexpr std::uint32_t kNewCluster = std::numeric_limits<std::uint32_t>::max();

  struct Cluster {
    std::size_t size = 0;
    std::unordered_map<CliqueId, std::size_t> clique_counts;
  };

  static double lookup(const std::unordered_map<CliqueId, std::size_t>& m, CliqueId q) {
    auto it = m.find(q);
    return it == m.end() ? 0.0 : static_cast<double>(it->second);
  }

  std::uint32_t open_cluster() {
    if (!free_.empty()) {
      const auto c = free_.back();
      free_.pop_back();
      return c;
    }
    clusters_.emplace_back();
    return static_cast<std::uint32_t>(clusters_.size() - 1);
  }

  void add(NodeId node, std::uint32_t c) {
    assignment_[node] = c;
    auto& cluster = clusters_[c];
    ++cluster.size;
    for (CliqueId q : index_.cliques_of(node)) ++cluster.clique_counts[q];
  }

  void remove(NodeId node) {
    const std::uint32_t c = assignment_[node];
    auto& cluster = clusters_[c];
    --cluster.size;
    for (CliqueId q : index_.cliques_of(node)) {
      if (--cluster.clique_counts[q] == 0) cluster.clique_counts.erase(q);
    }
    if (cluster.size == 0) free_.push_back(c);
  }

  const CliqueIndex& index_;
  std::vector<std::uint32_t> assignment_;
  std::vector<Cluster> clusters_;
  std::vector<std::uint32_t> free_;
};

// Gradient ascent on the four logits with a monotone backtracking guard.
GenerativeParams ascend_theta(const PairCounts& counts, GenerativeParams params,
                              std::size_t steps) {
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  struct Channel {
    double successes;
    double trials;
    double* theta;
  };
  std::array<Channel, 4> channels{{
      {d(counts.campaign_in), d(counts.pairs_in), &params.theta_campaign_in},
      {d(counts.campaign_out), d(counts.pairs_out), &params.theta_campaign_out},
      {d(counts.address_in), d(counts.pairs_in), &params.theta_address_in},
      {d(counts.address_out), d(counts.pairs_out), &params.theta_address_out},
  }};

  std::array<double, 4> eta{};
  for (std::size_t k = 0; k < 4; ++k) eta[k] = logit(*channels[k].theta);
  const std::array<double, 4> start = eta;

  auto objective = [&](const std::array<double, 4>& e) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      sum += bernoulli_channel(channels[k].successes, channels[k].trials, logistic(e[k]));
    }
    return sum;
  };

  const double total_trials = std::max(1.0, d(counts.pairs_in) + d(counts.pairs_out));
  double step = 1.0 / total_trials;
  double current = objective(eta);
  for (std::size_t s = 0; s < steps; ++s) {
    std::array<double, 4> grad{};
    bool flat = true;
    for (std::size_t k = 0; k < 4; ++k) {
      // d/d eta of s log(sigma) + (t - s) log(1 - sigma) = s - t sigma
      grad[k] = channels[k].successes - channels[k].trials * logistic(eta[k]);
      if (grad[k] != 0.0) flat = false;
    }
    if (flat) break;
    bool accepted = false;
    for (int halvings = 0; halvings < 60 && !accepted; ++halvings) {
      std::array<double, 4> trial{};
      for (std::size_t k = 0; k < 4; ++k) {
        trial[k] = std::clamp(eta[k] + step * grad[k], -kLogitBound, kLogitBound);
      }
      const double value = objective(trial);
      if (value >= current) {
        eta = trial;
        current = value;
        accepted = true;
        step *= 2.0;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (eta[k] != start[k]) *channels[k].theta = logistic(eta[k]);
  }
  return params;
}

}  // namespace

GenerativeFit generative_fit(const CliqueIndex& index, const GenerativeParams& init,
                             const GenerativeFitOptions& options) {
  init.validate();
  if (options.iterations < 1) throw ConfigError("generative_fit: iterations must be at least 1");

  std::mt19937_64 rng(options.seed);
  GenerativeSampler sampler(index);
  GenerativeFit fit{sampler.clustering(), init, {}};
  for (std::size_t it = 0; it < options.iterations; ++it) {
    sampler.sweep(fit.params, rng);
    fit.clustering = sampler.clustering();
    const auto counts = count_pairs(fit.clustering, index);
    const double before = generative_log_joint(fit.clustering, index, fit.params);
    fit.params = ascend_theta(counts, fit.params, options.ascent_steps);
    const double after = generative_log_joint(fit.clustering, index, fit.params);
    fit.ascent_trace.emplace_back(before, after);
  }
  return fit;
}

}  // namespace mgc
