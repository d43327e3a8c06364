#pragma once

#include <map>
#include <span>

#include "mgc/evidence_graph.hpp"

namespace mgc {

/// Concentration parameters, resolved per clique by kind unless a clique has
/// an explicit override.
class ConcentrationParams {
 public:
  ConcentrationParams(double alpha_address, double alpha_campaign);

  double alpha_address() const noexcept { return alpha_address_; }
  double alpha_campaign() const noexcept { return alpha_campaign_; }

  void set_override(CliqueId q, double alpha);
  double alpha_for(CliqueId q, CliqueKind kind) const;
  double alpha_for(const CliqueIndex& index, CliqueId q) const {
    return alpha_for(q, index.clique(q).kind);
  }

 private:
  double alpha_address_;
  double alpha_campaign_;
  std::map<CliqueId, double> overrides_;
};

/// Log CRP probability of one clique's partition given its table sizes:
///   K log a + lgamma(a) - lgamma(a + n) + sum_c lgamma(|c|)
/// Throws ParameterError for alpha <= 0, empty or zero-sized tables.
double log_crp_clique(std::span<const std::size_t> table_sizes, double alpha);

/// Unnormalized log posterior: the sum of log_crp_clique over all cliques.
/// Throws DomainError if the state is not minimal.
double log_posterior(const ClusteringState& state, const CliqueIndex& index,
                     const ConcentrationParams& params);

}  // namespace mgc
