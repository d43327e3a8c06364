#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "../support/builders.hpp"
#include "mgc/errors.hpp"
#include "mgc/evaluation.hpp"
#include "mgc/synthetic.hpp"

using namespace mgc;

namespace {

constexpr std::int64_t kHour = 3600;

MessageRecord at(NodeId id, std::string address, std::string campaign, double hours) {
  return MessageRecord{id, std::move(address), std::move(campaign),
                       1000 + static_cast<std::int64_t>(hours * kHour)};
}

double mann_whitney(const std::vector<ScoredExample>& examples) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& p : examples) {
    if (!p.positive) continue;
    for (const auto& n : examples) {
      if (n.positive) continue;
      pairs += 1.0;
      if (p.score > n.score) {
        wins += 1.0;
      } else if (p.score == n.score) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

std::vector<ScoredExample> random_examples(std::mt19937_64& rng, std::size_t n, int levels) {
  std::vector<ScoredExample> out;
  std::bernoulli_distribution label(0.3);
  for (std::size_t i = 0; i < n; ++i) {
    const double score = levels > 0 ? static_cast<double>(rng() % levels) / levels
                                     : std::uniform_real_distribution<double>(0, 1)(rng);
    out.push_back({"a", "s", score, label(rng)});
  }
  out[0].positive = true;
  out[1].positive = false;
  return out;
}

// Two passes over the raw messages, written without reference to the
// library's split.
struct FilterOracle {
  std::vector<NodeId> train;
  std::vector<NodeId> test;
};

FilterOracle filter_oracle(const std::vector<MessageRecord>& msgs, double train_h, double test_h,
                           std::size_t min_count) {
  std::int64_t t0 = msgs.front().timestamp;
  for (const auto& m : msgs) t0 = std::min(t0, m.timestamp);
  auto window = [&](const MessageRecord& m) {
    const double h = static_cast<double>(m.timestamp - t0) / kHour;
    if (h < train_h) return 0;
    if (h < train_h + test_h) return 1;
    return 2;
  };
  std::map<std::string, std::size_t> counts;
  for (const auto& m : msgs) {
    if (window(m) < 2) ++counts[m.campaign_id];
  }
  FilterOracle out;
  std::set<std::string> seen;
  for (const auto& m : msgs) {
    if (window(m) == 0 && counts[m.campaign_id] >= min_count) {
      out.train.push_back(m.node_id);
      seen.insert(m.address_id);
    }
  }
  for (const auto& m : msgs) {
    if (window(m) == 1 && counts[m.campaign_id] >= min_count && seen.contains(m.address_id)) {
      out.test.push_back(m.node_id);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("everything in the first hour leaves the test window empty") {
  const std::vector<MessageRecord> msgs{at(0, "a", "s", 0.1), at(1, "b", "s", 0.5)};
  const auto split = split_train_test(msgs, SplitOptions{16, 8, 1});
  CHECK(split.train.size() == 2);
  CHECK(split.test.empty());
}

TEST_CASE("test messages from unseen addresses are dropped") {
  const std::vector<MessageRecord> msgs{at(0, "a", "s", 1), at(1, "a", "s", 17), at(2, "new", "s", 18),
                                        at(3, "a", "t", 30)};
  const auto split = split_train_test(msgs, SplitOptions{16, 8, 1});
  REQUIRE(split.test.size() == 1);
  CHECK(split.test[0].address_id == "a");
  CHECK(split.test[0].node_id == 0);
  CHECK(split.test_origin == std::vector<NodeId>{1});
}

TEST_CASE("rare campaigns are dropped from both windows") {
  const std::vector<MessageRecord> msgs{at(0, "a", "rare", 1), at(1, "a", "common", 2),
                                        at(2, "a", "common", 17), at(3, "a", "rare", 18),
                                        at(4, "a", "common", 3)};
  const auto split = split_train_test(msgs, SplitOptions{16, 8, 3});
  CHECK(split.train_origin == std::vector<NodeId>{1, 4});
  CHECK(split.test_origin == std::vector<NodeId>{2});
  for (const auto& m : split.train) CHECK(m.campaign_id == "common");
  for (const auto& m : split.test) CHECK(m.campaign_id == "common");
  CHECK_THROWS_AS(split_train_test(msgs, SplitOptions{16, 8, 10}), DataError);
  CHECK_THROWS_AS(split_train_test(std::vector<MessageRecord>{}, SplitOptions{}), DataError);
  CHECK_THROWS_AS(split_train_test(msgs, SplitOptions{0, 8, 1}), ConfigError);
}

TEST_CASE("split agrees with an independent filter") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    WorldConfig config;
    config.seed = seed;
    config.campaign_sharing = 0.3;
    config.address_reassignment_rate = 2.0;
    config.observation_fraction = 0.5;
    config.campaigns_per_botnet = 6;
    config.messages_per_hour = 6;
    const auto trace = generate_trace(config);
    for (std::size_t min_count : {1, 5, 20}) {
      const auto split = split_train_test(trace.messages, SplitOptions{16, 8, min_count});
      const auto expected = filter_oracle(trace.messages, 16, 8, min_count);
      CHECK(split.train_origin == expected.train);
      CHECK(split.test_origin == expected.test);
      for (std::size_t i = 0; i < split.test.size(); ++i) {
        CHECK(split.test[i].node_id == i);
        CHECK(split.test[i].address_id == trace.messages[split.test_origin[i]].address_id);
      }
    }
  }
}

TEST_CASE("examples cover the training campaigns per test address") {
  const std::vector<MessageRecord> test{at(0, "a", "s1", 17), at(1, "a", "s1", 18), at(2, "a", "s9", 19),
                                        at(3, "b", "s2", 20)};
  const std::set<std::string> universe{"s1", "s2", "s3"};
  const PredictionTable predictions{{"a", {{"s1", 0.7}, {"s2", 0.3}}}, {"b", {{"s2", 1.0}}}};
  const auto examples = build_examples(test, universe, predictions);
  // a: s1 s2 s3 s9, b: s1 s2 s3
  REQUIRE(examples.size() == 7);
  std::map<std::pair<std::string, std::string>, ScoredExample> by_pair;
  for (const auto& e : examples) CHECK(by_pair.emplace(std::pair{e.address_id, e.campaign_id}, e).second);
  CHECK(by_pair.at({"a", "s1"}).positive);
  CHECK(by_pair.at({"a", "s1"}).score == 0.7);
  CHECK(by_pair.at({"a", "s9"}).positive);
  CHECK(by_pair.at({"a", "s9"}).score == 0.0);
  CHECK_FALSE(by_pair.at({"a", "s2"}).positive);
  CHECK(by_pair.at({"b", "s2"}).positive);
  CHECK_FALSE(by_pair.at({"b", "s3"}).positive);

  const PredictionTable missing{{"a", {{"s1", 1.0}}}};
  CHECK_THROWS_AS(build_examples(test, universe, missing), UnknownAddressError);
}

TEST_CASE("perfect separation") {
  const std::vector<ScoredExample> examples{
      {"a", "s", 0.9, true}, {"a", "t", 0.8, true}, {"b", "s", 0.2, false}, {"b", "t", 0.1, false}};
  const auto roc = build_roc(examples);
  CHECK(roc.auc == 1.0);
  CHECK(roc.positives == 2);
  CHECK(roc.negatives == 2);
}

TEST_CASE("all scores equal") {
  const std::vector<ScoredExample> examples{
      {"a", "s", 0.4, true}, {"a", "t", 0.4, false}, {"b", "s", 0.4, false}};
  const auto roc = build_roc(examples);
  CHECK(roc.auc == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(roc.points.size() == 2);
  CHECK(roc.points[1].threshold == 0.4);
}

TEST_CASE("random scores") {
  std::mt19937_64 rng(2);
  const auto examples = random_examples(rng, 10000, 0);
  CHECK(std::abs(build_roc(examples).auc - 0.5) <= 0.02);
}

TEST_CASE("trapezoid area equals the rank statistic") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto examples = random_examples(rng, 2 + rng() % 300, trial % 3 == 0 ? 0 : 1 + trial % 7);
    const auto roc = build_roc(examples);
    CHECK(std::abs(roc.auc - mann_whitney(examples)) < 1e-9);

    CHECK(roc.points.front().false_positive_rate == 0.0);
    CHECK(roc.points.front().true_positive_rate == 0.0);
    CHECK(roc.points.back().false_positive_rate == 1.0);
    CHECK(roc.points.back().true_positive_rate == 1.0);
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
      CHECK(roc.points[k].false_positive_rate >= roc.points[k - 1].false_positive_rate);
      CHECK(roc.points[k].true_positive_rate >= roc.points[k - 1].true_positive_rate);
      CHECK(roc.points[k].threshold < roc.points[k - 1].threshold);
    }
  }
}

TEST_CASE("one-class example sets are rejected") {
  const std::vector<ScoredExample> only_positive{{"a", "s", 0.4, true}};
  CHECK_THROWS_AS(build_roc(only_positive), DataError);
  CHECK_THROWS_AS(build_roc(std::vector<ScoredExample>{}), DataError);
}

TEST_CASE("method names") {
  for (auto m : {Method::kMinimalGraph, Method::kThreshold, Method::kGenerative}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("spectral"), ConfigError);
}

TEST_CASE("alpha tuning") {
  WorldConfig world;
  world.num_botnets = 3;
  world.addresses_per_botnet = 8;
  world.messages_per_hour = 8;
  world.seed = 6;
  const auto trace = generate_trace(world);
  const auto split = split_train_test(trace.messages, SplitOptions{16, 8, 1});
  const ChainConfig chain{20, 2, 10, 4};

  const std::vector<std::pair<double, double>> single{{0.7, 0.3}};
  const auto one = tune_alphas(split.train, split.test, single, chain);
  CHECK(one.alpha_address == 0.7);
  CHECK(one.alpha_campaign == 0.3);
  CHECK(one.aucs.size() == 1);

  // A small alpha recovers the botnets on this world.
  const auto recovered = run_chain(CliqueIndex::build(split.train), ConcentrationParams(0.05, 0.05), chain);
  std::vector<std::int64_t> truth;
  for (auto origin : split.train_origin) truth.push_back(static_cast<std::int64_t>(trace.truth_botnet[origin]));
  CHECK(adjusted_rand_index(most_frequent_clustering(recovered), Clustering::from_labels(truth)) >= 0.95);

  const std::vector<std::pair<double, double>> grid{{50.0, 50.0}, {0.05, 0.05}, {5.0, 0.5}};
  const auto choice = tune_alphas(split.train, split.test, grid, chain);
  const double truth_auc = choice.aucs[1];
  CHECK(choice.auc == *std::max_element(choice.aucs.begin(), choice.aucs.end()));
  CHECK(choice.auc >= truth_auc);

  auto reversed = grid;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(tune_alphas(split.train, split.test, reversed, chain).auc == choice.auc);

  const auto tie = select_best(
      TrainTestSplit{split.train, split.test, {}, {}},
      std::vector<PipelineConfig>{PipelineConfig{}, PipelineConfig{}});
  CHECK(tie.best_index == 0);
  CHECK_THROWS_AS(tune_alphas(split.train, split.test, std::vector<std::pair<double, double>>{}, chain),
                  ConfigError);
}

TEST_CASE("every method runs through the pipeline") {
  WorldConfig world;
  world.num_botnets = 3;
  world.addresses_per_botnet = 6;
  world.messages_per_hour = 6;
  world.seed = 10;
  const auto trace = generate_trace(world);
  const auto split = split_train_test(trace.messages, SplitOptions{16, 8, 1});
  for (auto method : {Method::kMinimalGraph, Method::kThreshold, Method::kGenerative}) {
    PipelineConfig config;
    config.method = method;
    config.chain = ChainConfig{10, 1, 5, 1};
    config.generative_options.iterations = 5;
    const auto roc = run_pipeline(split, config);
    CHECK(roc.auc >= 0.0);
    CHECK(roc.auc <= 1.0);
    CHECK(roc.auc == run_pipeline(split, config).auc);
  }
}
