#include "mgc/gibbs_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "mgc/errors.hpp"

namespace mgc {

void ChainConfig::validate() const {
  if (thinning < 1) throw ConfigError("thinning must be at least 1");
  if (kept_samples < 1) throw ConfigError("kept_samples must be at least 1");
}

namespace {

bool sorted_disjoint(const std::vector<CliqueId>& a, const std::vector<CliqueId>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return false;
    if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return true;
}

class ComponentCliques {
 public:
  explicit ComponentCliques(const ClusteringState& state) : state_(state) {}

  const std::vector<CliqueId>& operator()(ComponentId c) {
    auto [it, inserted] = cache_.try_emplace(c);
    if (inserted) {
      it->second.reserve(state_.component_tables(c).size());
      for (TableId t : state_.component_tables(c)) it->second.push_back(state_.table(t).clique);
      std::sort(it->second.begin(), it->second.end());
    }
    return it->second;
  }

 private:
  const ClusteringState& state_;
  std::unordered_map<ComponentId, std::vector<CliqueId>> cache_;
};

// Components holding a table of the given clique.
std::vector<ComponentId> components_of(const ClusteringState& state, const std::vector<TableId>& tables) {
  std::vector<ComponentId> out;
  out.reserve(tables.size());
  for (TableId t : tables) out.push_back(state.table(t).component);
  std::sort(out.begin(), out.end());
  return out;
}

bool contains(const std::vector<ComponentId>& sorted, ComponentId c) {
  return std::binary_search(sorted.begin(), sorted.end(), c);
}

}  // namespace

std::vector<CandidateAssignment> enumerate_candidates(ClusteringState& state,
                                                      const CliqueIndex& index, NodeId node) {
  state.detach(node);
  const CliqueId address_clique = index.clique_of(node, CliqueKind::kAddress);
  const CliqueId campaign_clique = index.clique_of(node, CliqueKind::kCampaign);
  const auto& address_tables = state.tables_of_clique(address_clique);
  const auto& campaign_tables = state.tables_of_clique(campaign_clique);

  std::vector<CandidateAssignment> out;
  out.reserve((address_tables.size() + 1) * (campaign_tables.size() + 1));
  out.push_back({kNoTable, kNoTable});

  ComponentCliques cliques_of(state);
  const auto address_components = components_of(state, address_tables);
  const auto campaign_components = components_of(state, campaign_tables);

  // A fresh address table may join a campaign table only if that component
  // holds no table of the node's address clique.
  for (TableId ts : campaign_tables) {
    if (!contains(address_components, state.table(ts).component)) out.push_back({kNoTable, ts});
  }

  for (TableId ta : address_tables) {
    const ComponentId ca = state.table(ta).component;
    const bool ca_has_campaign = contains(campaign_components, ca);
    if (!ca_has_campaign) out.push_back({ta, kNoTable});
    for (TableId ts : campaign_tables) {
      const ComponentId cs = state.table(ts).component;
      if (cs == ca) {
        out.push_back({ta, ts});
      } else if (!ca_has_campaign && !contains(address_components, cs) &&
                 sorted_disjoint(cliques_of(ca), cliques_of(cs))) {
        out.push_back({ta, ts});
      }
    }
  }
  return out;
}

double candidate_log_weight(const ClusteringState& state, const CliqueIndex& index, NodeId node,
                            const CandidateAssignment& candidate,
                            const ConcentrationParams& params) {
  if (state.attached(node)) throw std::logic_error("candidate_log_weight: node must be detached");
  double sum = 0.0;
  for (CliqueKind kind : {CliqueKind::kAddress, CliqueKind::kCampaign}) {
    const CliqueId q = index.clique_of(node, kind);
    const TableId chosen =
        kind == CliqueKind::kAddress ? candidate.address_table : candidate.campaign_table;
    auto sizes = state.table_sizes(q);
    if (chosen == kNoTable) {
      sizes.push_back(1);
    } else {
      const auto& ids = state.tables_of_clique(q);
      auto it = std::find(ids.begin(), ids.end(), chosen);
      if (it == ids.end()) throw std::invalid_argument("candidate table is not in the node's clique");
      ++sizes[static_cast<std::size_t>(it - ids.begin())];
    }
    sum += log_crp_clique(sizes, params.alpha_for(q, kind));
  }
  return sum;
}

namespace {

// Log weight up to a per-clique constant: log |t| for joining table t,
// log alpha for a new table. The constants cancel on normalization.
std::vector<double> relative_log_weights(const ClusteringState& state, const CliqueIndex& index,
                                         NodeId node,
                                         const std::vector<CandidateAssignment>& candidates,
                                         const ConcentrationParams& params) {
  const CliqueId qa = index.clique_of(node, CliqueKind::kAddress);
  const CliqueId qs = index.clique_of(node, CliqueKind::kCampaign);
  const double log_alpha_a = std::log(params.alpha_for(qa, CliqueKind::kAddress));
  const double log_alpha_s = std::log(params.alpha_for(qs, CliqueKind::kCampaign));
  auto term = [&](TableId t, double log_alpha) {
    return t == kNoTable ? log_alpha
                         : std::log(static_cast<double>(state.table(t).members.size()));
  };
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back(term(c.address_table, log_alpha_a) + term(c.campaign_table, log_alpha_s));
  }
  return out;
}

void exponentiate_shifted(std::vector<double>& log_weights) {
  const double max = *std::max_element(log_weights.begin(), log_weights.end());
  for (double& w : log_weights) w = std::exp(w - max);
}

}  // namespace

std::vector<double> candidate_probabilities(const ClusteringState& state,
                                            const CliqueIndex& index, NodeId node,
                                            const std::vector<CandidateAssignment>& candidates,
                                            const ConcentrationParams& params) {
  if (candidates.empty()) throw std::invalid_argument("candidate_probabilities: no candidates");
  auto weights = relative_log_weights(state, index, node, candidates, params);
  exponentiate_shifted(weights);
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return weights;
}

void apply_candidate(ClusteringState& state, const CliqueIndex& index, NodeId node,
                     const CandidateAssignment& candidate) {
  state.attach(index, node, candidate.address_table, candidate.campaign_table);
}

void gibbs_step(ClusteringState& state, const CliqueIndex& index, NodeId node,
                const ConcentrationParams& params, Rng& rng) {
  const auto candidates = enumerate_candidates(state, index, node);
  std::size_t pick = 0;
  if (candidates.size() > 1) {
    auto weights = relative_log_weights(state, index, node, candidates, params);
    exponentiate_shifted(weights);
    double total = 0.0;
    for (double w : weights) total += w;
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    pick = candidates.size() - 1;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (u < weights[k]) {
        pick = k;
        break;
      }
      u -= weights[k];
    }
  }
  apply_candidate(state, index, node, candidates[pick]);
}

void gibbs_sweep(ClusteringState& state, const CliqueIndex& index,
                 const ConcentrationParams& params, Rng& rng) {
  for (NodeId node = 0; node < index.num_nodes(); ++node) {
    gibbs_step(state, index, node, params, rng);
  }
}

std::vector<ChainSample> run_chain(const CliqueIndex& index, const ConcentrationParams& params,
                                   const ChainConfig& config,
                                   std::optional<ClusteringState> warm_start) {
  config.validate();
  ClusteringState state = warm_start ? std::move(*warm_start) : ClusteringState::singletons(index);
  if (state.num_nodes() != index.num_nodes()) {
    throw std::invalid_argument("run_chain: warm start does not match the graph");
  }
  if (!is_minimal(state)) throw DomainError("run_chain: warm start is not minimal");

  Rng rng(config.seed);
  std::size_t sweeps = 0;
  for (; sweeps < config.burn_in_sweeps; ++sweeps) gibbs_sweep(state, index, params, rng);

  std::vector<ChainSample> samples;
  samples.reserve(config.kept_samples);
  std::size_t since_burn_in = 0;
  while (samples.size() < config.kept_samples) {
    gibbs_sweep(state, index, params, rng);
    ++sweeps;
    if (++since_burn_in % config.thinning == 0) {
      samples.push_back(ChainSample{global_clusters(state), sweeps});
    }
  }
  return samples;
}

Clustering most_frequent_clustering(const std::vector<ChainSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("most_frequent_clustering: no samples");
  std::map<Clustering, std::pair<std::size_t, std::size_t>> counts;  // count, first position
  for (std::size_t k = 0; k < samples.size(); ++k) {
    auto [it, inserted] = counts.try_emplace(samples[k].clustering, 0, k);
    ++it->second.first;
  }
  const Clustering* best = nullptr;
  std::pair<std::size_t, std::size_t> best_key{0, 0};
  for (const auto& [clustering, stats] : counts) {
    if (best == nullptr || stats.first > best_key.first ||
        (stats.first == best_key.first && stats.second < best_key.second)) {
      best = &clustering;
      best_key = stats;
    }
  }
  return *best;
}

}  // namespace mgc
