#include "mgc/crp_posterior.hpp"

#include <cmath>
#include <string>

#include "mgc/errors.hpp"

namespace mgc {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("concentration parameter must be positive and finite, got " +
                         std::to_string(alpha));
  }
}

}  // namespace

ConcentrationParams::ConcentrationParams(double alpha_address, double alpha_campaign)
    : alpha_address_(alpha_address), alpha_campaign_(alpha_campaign) {
  check_alpha(alpha_address);
  check_alpha(alpha_campaign);
}

void ConcentrationParams::set_override(CliqueId q, double alpha) {
  check_alpha(alpha);
  overrides_[q] = alpha;
}

double ConcentrationParams::alpha_for(CliqueId q, CliqueKind kind) const {
  if (!overrides_.empty()) {
    if (auto it = overrides_.find(q); it != overrides_.end()) return it->second;
  }
  return kind == CliqueKind::kAddress ? alpha_address_ : alpha_campaign_;
}

double log_crp_clique(std::span<const std::size_t> table_sizes, double alpha) {
  check_alpha(alpha);
  if (table_sizes.empty()) throw ParameterError("log_crp_clique: no tables");
  double total = 0.0;
  double sum_lgamma = 0.0;
  for (std::size_t size : table_sizes) {
    if (size == 0) throw ParameterError("log_crp_clique: empty table");
    total += static_cast<double>(size);
    sum_lgamma += std::lgamma(static_cast<double>(size));
  }
  return static_cast<double>(table_sizes.size()) * std::log(alpha) + std::lgamma(alpha) -
         std::lgamma(alpha + total) + sum_lgamma;
}

double log_posterior(const ClusteringState& state, const CliqueIndex& index,
                     const ConcentrationParams& params) {
  if (!is_minimal(state)) {
    throw DomainError("log_posterior: clustering is not minimal (posterior probability 0)");
  }
  double sum = 0.0;
  for (CliqueId q = 0; q < index.num_cliques(); ++q) {
    const auto sizes = state.table_sizes(q);
    sum += log_crp_clique(sizes, params.alpha_for(index, q));
  }
  return sum;
}

}  // namespace mgc
