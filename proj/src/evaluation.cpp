#include "mgc/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "mgc/errors.hpp"

namespace mgc {

std::vector<MessageRecord> renumbered(std::span<const MessageRecord> messages) {
  std::vector<MessageRecord> out(messages.begin(), messages.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].node_id = static_cast<NodeId>(i);
  return out;
}

TrainTestSplit split_train_test(std::span<const MessageRecord> messages,
                                const SplitOptions& options) {
  if (!(options.train_hours > 0.0) || !(options.test_hours >= 0.0)) {
    throw ConfigError("train hours must be positive and test hours non-negative");
  }
  if (messages.empty()) throw DataError("split_train_test: no messages");

  std::vector<const MessageRecord*> ordered;
  ordered.reserve(messages.size());
  for (const auto& m : messages) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(),
            [](const MessageRecord* a, const MessageRecord* b) { return a->node_id < b->node_id; });

  std::int64_t t0 = std::numeric_limits<std::int64_t>::max();
  for (const auto& m : messages) t0 = std::min(t0, m.timestamp);
  const double train_end = static_cast<double>(t0) + options.train_hours * 3600.0;
  const double test_end = train_end + options.test_hours * 3600.0;

  auto in_train = [&](const MessageRecord& m) { return static_cast<double>(m.timestamp) < train_end; };
  auto in_test = [&](const MessageRecord& m) {
    const double t = static_cast<double>(m.timestamp);
    return t >= train_end && t < test_end;
  };

  std::unordered_map<std::string, std::size_t> campaign_counts;
  for (const auto* m : ordered) {
    if (in_train(*m) || in_test(*m)) ++campaign_counts[m->campaign_id];
  }
  auto frequent = [&](const MessageRecord& m) {
    return campaign_counts[m.campaign_id] >= options.min_campaign_count;
  };

  TrainTestSplit split;
  std::unordered_set<std::string> train_addresses;
  for (const auto* m : ordered) {
    if (in_train(*m) && frequent(*m)) {
      split.train_origin.push_back(m->node_id);
      split.train.push_back(*m);
      train_addresses.insert(m->address_id);
    }
  }
  if (split.train.empty()) throw DataError("split_train_test: the training window is empty");
  for (const auto* m : ordered) {
    if (in_test(*m) && frequent(*m) && train_addresses.contains(m->address_id)) {
      split.test_origin.push_back(m->node_id);
      split.test.push_back(*m);
    }
  }
  split.train = renumbered(split.train);
  split.test = renumbered(split.test);
  return split;
}

std::set<std::string> campaign_universe(std::span<const MessageRecord> training) {
  std::set<std::string> out;
  for (const auto& m : training) out.insert(m.campaign_id);
  return out;
}

std::vector<ScoredExample> build_examples(std::span<const MessageRecord> test,
                                          const std::set<std::string>& universe,
                                          const PredictionTable& predictions) {
  std::map<std::string, std::set<std::string>> sent;
  for (const auto& m : test) sent[m.address_id].insert(m.campaign_id);

  std::vector<ScoredExample> out;
  for (const auto& [address, campaigns] : sent) {
    auto it = predictions.find(address);
    if (it == predictions.end()) throw UnknownAddressError(address);
    const auto& dist = it->second;
    std::set<std::string> candidates = universe;
    candidates.insert(campaigns.begin(), campaigns.end());
    for (const auto& campaign : candidates) {
      auto p = dist.find(campaign);
      out.push_back(ScoredExample{address, campaign, p == dist.end() ? 0.0 : p->second,
                                  campaigns.contains(campaign)});
    }
  }
  return out;
}

RocCurve build_roc(std::span<const ScoredExample> examples) {
  RocCurve roc;
  for (const auto& e : examples) (e.positive ? roc.positives : roc.negatives) += 1;
  if (roc.positives == 0 || roc.negatives == 0) {
    throw DataError("build_roc: need at least one positive and one negative example");
  }

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return examples[a].score > examples[b].score;
  });

  const double p = static_cast<double>(roc.positives);
  const double n = static_cast<double>(roc.negatives);
  roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double score = examples[order[k]].score;
    while (k < order.size() && examples[order[k]].score == score) {
      (examples[order[k]].positive ? tp : fp) += 1;
      ++k;
    }
    const RocPoint& prev = roc.points.back();
    RocPoint next{static_cast<double>(fp) / n, static_cast<double>(tp) / p, score};
    roc.auc += (next.false_positive_rate - prev.false_positive_rate) *
               (next.true_positive_rate + prev.true_positive_rate) / 2.0;
    roc.points.push_back(next);
  }
  return roc;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kMinimalGraph:
      return "mgc";
    case Method::kThreshold:
      return "threshold";
    case Method::kGenerative:
      return "generative";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "mgc") return Method::kMinimalGraph;
  if (name == "threshold") return Method::kThreshold;
  if (name == "generative") return Method::kGenerative;
  throw ConfigError("unknown method '" + name + "' (expected mgc, threshold, or generative)");
}

std::vector<ChainSample> fit_clusterings(std::span<const MessageRecord> train,
                                         const PipelineConfig& config) {
  switch (config.method) {
    case Method::kMinimalGraph: {
      const auto index = CliqueIndex::build(train);
      return run_chain(index, ConcentrationParams(config.alpha_address, config.alpha_campaign),
                       config.chain);
    }
    case Method::kThreshold:
      return {ChainSample{threshold_cluster(train, config.threshold), 0}};
    case Method::kGenerative: {
      const auto index = CliqueIndex::build(train);
      auto fit = generative_fit(index, config.generative, config.generative_options);
      return {ChainSample{std::move(fit.clustering), config.generative_options.iterations}};
    }
  }
  throw std::logic_error("fit_clusterings: unhandled method");
}

PredictionTable predict_all(std::span<const ChainSample> samples,
                            std::span<const MessageRecord> train, double smoothing) {
  const PosteriorPredictor predictor(samples, train, smoothing);
  std::set<std::string> addresses;
  for (const auto& m : train) addresses.insert(m.address_id);
  PredictionTable table;
  for (const auto& a : addresses) table.emplace(a, predictor.predict(a));
  return table;
}

RocCurve evaluate_predictions(const TrainTestSplit& split, const PredictionTable& predictions) {
  const auto examples = build_examples(split.test, campaign_universe(split.train), predictions);
  return build_roc(examples);
}

RocCurve run_pipeline(const TrainTestSplit& split, const PipelineConfig& config) {
  const auto samples = fit_clusterings(split.train, config);
  return evaluate_predictions(split, predict_all(samples, split.train, config.smoothing));
}

TuneResult select_best(const TrainTestSplit& split, std::span<const PipelineConfig> candidates) {
  if (candidates.empty()) throw ConfigError("tuning grid is empty");
  TuneResult result;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double auc = run_pipeline(split, candidates[k]).auc;
    result.aucs.push_back(auc);
    if (k == 0 || auc > result.best_auc) {
      result.best_auc = auc;
      result.best_index = k;
    }
  }
  return result;
}

AlphaChoice tune_alphas(std::span<const MessageRecord> train,
                        std::span<const MessageRecord> validation,
                        std::span<const std::pair<double, double>> grid, const ChainConfig& chain,
                        double smoothing) {
  TrainTestSplit split;
  split.train = renumbered(train);
  split.test = renumbered(validation);
  std::vector<PipelineConfig> candidates;
  for (const auto& [aa, as] : grid) {
    PipelineConfig config;
    config.method = Method::kMinimalGraph;
    config.alpha_address = aa;
    config.alpha_campaign = as;
    config.chain = chain;
    config.smoothing = smoothing;
    candidates.push_back(config);
  }
  const auto result = select_best(split, candidates);
  return AlphaChoice{grid[result.best_index].first, grid[result.best_index].second,
                     result.best_auc, result.aucs};
}

}  // namespace mgc
