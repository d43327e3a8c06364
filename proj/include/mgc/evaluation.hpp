#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgc/baselines.hpp"
#include "mgc/campaign_predictor.hpp"
#include "mgc/evidence_graph.hpp"
#include "mgc/gibbs_sampler.hpp"

namespace mgc {

struct SplitOptions {
  double train_hours = 16.0;
  double test_hours = 8.0;
  /// Messages of campaigns seen fewer times than this (over both windows)
  /// are dropped from train and test.
  std::size_t min_campaign_count = 5;
};

/// Train and test messages renumbered to contiguous node ids; `*_origin`
/// maps each new id back to the input node id.
struct TrainTestSplit {
  std::vector<MessageRecord> train;
  std::vector<MessageRecord> test;
  std::vector<NodeId> train_origin;
  std::vector<NodeId> test_origin;
};

/// Train = [t0, t0 + train), test = [t0 + train, t0 + train + test) with t0
/// the earliest timestamp; test keeps only addresses present in train.
/// Throws DataError if the training window ends up empty.
TrainTestSplit split_train_test(std::span<const MessageRecord> messages,
                                const SplitOptions& options);

/// Copies of `messages` with node ids 0..n-1 in input order.
std::vector<MessageRecord> renumbered(std::span<const MessageRecord> messages);

std::set<std::string> campaign_universe(std::span<const MessageRecord> training);

struct ScoredExample {
  std::string address_id;
  std::string campaign_id;
  double score = 0.0;
  bool positive = false;
};

using PredictionTable = std::map<std::string, CampaignDistribution>;

/// One example per distinct (test address, campaign) pair over the training
/// campaign universe plus the campaigns the address sent during the test
/// window. A pair is positive iff the address sent that campaign in the test
/// window. Missing predictions score 0; addresses absent from `predictions`
/// raise UnknownAddressError.
std::vector<ScoredExample> build_examples(std::span<const MessageRecord> test,
                                          const std::set<std::string>& universe,
                                          const PredictionTable& predictions);

struct RocPoint {
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;
  double threshold = 0.0;  // scores >= threshold are predicted positive
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Sweeps thresholds over the distinct scores and integrates with the
/// trapezoidal rule (ties count half). Throws DataError unless both classes
/// are present.
RocCurve build_roc(std::span<const ScoredExample> examples);

// ---------------------------------------------------------------------------
// End-to-end pipeline shared by the CLI, tuning, and acceptance tests.
// ---------------------------------------------------------------------------

enum class Method { kMinimalGraph, kThreshold, kGenerative };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct PipelineConfig {
  Method method = Method::kMinimalGraph;
  double alpha_address = 1.0;
  double alpha_campaign = 1.0;
  ChainConfig chain;
  double threshold = 0.5;
  GenerativeParams generative;
  GenerativeFitOptions generative_options;
  double smoothing = 0.0;
};

/// Clusterings of the (contiguously numbered) training messages: the chain
/// samples for the minimal-graph method, a single clustering for baselines.
std::vector<ChainSample> fit_clusterings(std::span<const MessageRecord> train,
                                         const PipelineConfig& config);

/// Posterior predictions for every address occurring in `train`.
PredictionTable predict_all(std::span<const ChainSample> samples,
                            std::span<const MessageRecord> train, double smoothing);

RocCurve evaluate_predictions(const TrainTestSplit& split, const PredictionTable& predictions);

RocCurve run_pipeline(const TrainTestSplit& split, const PipelineConfig& config);

struct TuneResult {
  std::size_t best_index = 0;
  double best_auc = 0.0;
  std::vector<double> aucs;  // one per candidate, in input order
};

/// Runs the pipeline once per candidate configuration and keeps the first
/// one attaining the highest AUC.
TuneResult select_best(const TrainTestSplit& split, std::span<const PipelineConfig> candidates);

struct AlphaChoice {
  double alpha_address = 1.0;
  double alpha_campaign = 1.0;
  double auc = 0.0;
  std::vector<double> aucs;
};

/// Grid search over (alpha_address, alpha_campaign) for the minimal-graph
/// method on a tuning split.
AlphaChoice tune_alphas(std::span<const MessageRecord> train,
                        std::span<const MessageRecord> validation,
                        std::span<const std::pair<double, double>> grid, const ChainConfig& chain,
                        double smoothing = 0.0);

}  // namespace mgc
