#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "../support/builders.hpp"
#include "../support/oracles.hpp"
#include "mgc/crp_posterior.hpp"
#include "mgc/errors.hpp"

using namespace mgc;
using testing_support::messages_from;
using testing_support::three_messages;

namespace {

double crp(std::vector<std::size_t> sizes, double alpha) {
  return std::exp(log_crp_clique(sizes, alpha));
}

}  // namespace

TEST_CASE("single-node clique has probability one") {
  for (double alpha : {0.01, 0.3, 1.0, 7.5, 1e4}) {
    CHECK(std::abs(log_crp_clique(std::vector<std::size_t>{1}, alpha)) < 1e-9);
  }
}

TEST_CASE("two-node clique") {
  for (double alpha : {0.1, 1.0, 3.0}) {
    const double apart = crp({1, 1}, alpha);
    const double together = crp({2}, alpha);
    CHECK(apart == doctest::Approx(alpha / (alpha + 1.0)).epsilon(1e-12));
    CHECK(together == doctest::Approx(1.0 / (alpha + 1.0)).epsilon(1e-12));
    CHECK(apart + together == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("three-node clique at alpha one") {
  CHECK(crp({1, 1, 1}, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(crp({3}, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(crp({2, 1}, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(crp({1, 2}, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("clique score matches the gamma-function oracle") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::uniform_real_distribution<double> alpha(0.05, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> sizes(1 + trial % 4);
    for (auto& s : sizes) s = size(rng);
    const double a = alpha(rng);
    CHECK(crp(sizes, a) == doctest::Approx(oracle::crp_probability(sizes, a)).epsilon(1e-10));
  }
}

TEST_CASE("clique scores normalize over set partitions") {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto partitions = oracle::all_set_partitions(n);
    for (double alpha : {0.1, 1.0, 5.0}) {
      double total = 0.0;
      for (const auto& p : partitions) {
        total += std::exp(log_crp_clique(p.sizes(), alpha));
      }
      CAPTURE(n);
      CAPTURE(alpha);
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("set partition enumeration has Bell-number size") {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  for (std::size_t n = 0; n <= 8; ++n) CHECK(oracle::all_set_partitions(n).size() == bell[n]);
}

TEST_CASE("larger alpha favors more tables") {
  for (std::size_t n = 2; n <= 30; n += 7) {
    const std::vector<std::size_t> all_apart(n, 1);
    const std::vector<std::size_t> one_table{n};
    double previous = -INFINITY;
    for (double alpha : {0.05, 0.5, 1.0, 2.0, 10.0}) {
      const double gap = log_crp_clique(all_apart, alpha) - log_crp_clique(one_table, alpha);
      CHECK(gap > previous);
      previous = gap;
    }
  }
}

TEST_CASE("large cliques stay finite") {
  const std::vector<std::size_t> sizes{5000, 3000, 1};
  const double v = log_crp_clique(sizes, 0.5);
  CHECK(std::isfinite(v));
  CHECK(v < 0.0);
}

TEST_CASE("clique score rejects bad parameters") {
  const std::vector<std::size_t> ok{1, 2};
  CHECK_THROWS_AS(log_crp_clique(ok, 0.0), ParameterError);
  CHECK_THROWS_AS(log_crp_clique(ok, -1.0), ParameterError);
  CHECK_THROWS_AS(log_crp_clique(ok, NAN), ParameterError);
  CHECK_THROWS_AS(log_crp_clique(std::vector<std::size_t>{}, 1.0), ParameterError);
  CHECK_THROWS_AS(log_crp_clique(std::vector<std::size_t>{2, 0}, 1.0), ParameterError);
  CHECK_THROWS_AS(ConcentrationParams(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(ConcentrationParams(1.0, -2.0), ParameterError);
}

TEST_CASE("concentration lookup by kind and override") {
  const auto index = CliqueIndex::build(three_messages());
  ConcentrationParams params(0.25, 4.0);
  CHECK(params.alpha_for(index, 0) == 0.25);
  CHECK(params.alpha_for(index, 1) == 4.0);
  params.set_override(1, 2.0);
  CHECK(params.alpha_for(index, 1) == 2.0);
  CHECK(params.alpha_for(index, 2) == 4.0);
  CHECK_THROWS_AS(params.set_override(0, 0.0), ParameterError);
}

TEST_CASE("posterior of a single full clique reduces to one CRP term") {
  // All messages share a campaign but have distinct addresses: the address
  // cliques are singletons (probability one) and the campaign clique is a
  // plain CRP over the nodes.
  const auto msgs = messages_from({{"a0", "s"}, {"a1", "s"}, {"a2", "s"}, {"a3", "s"}});
  const auto index = CliqueIndex::build(msgs);
  const ConcentrationParams params(0.7, 1.3);
  for (const auto& c : oracle::all_set_partitions(4)) {
    const auto state = ClusteringState::from_clustering(index, c);
    CHECK(log_posterior(state, index, params) ==
          doctest::Approx(log_crp_clique(c.sizes(), 1.3)).epsilon(1e-12));
  }
}

TEST_CASE("posterior of one node is zero") {
  const auto index = CliqueIndex::build(messages_from({{"a", "s"}}));
  CHECK(log_posterior(ClusteringState::singletons(index), index, ConcentrationParams(2.0, 3.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("posterior of the three message singleton state") {
  const auto index = CliqueIndex::build(three_messages());
  const auto state = ClusteringState::singletons(index);
  // a1 {0}{1}: 1/2, a2 {2}: 1, s1 {0}: 1, s2 {1}{2}: 1/2
  CHECK(log_posterior(state, index, ConcentrationParams(1.0, 1.0)) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-12));
}

TEST_CASE("posterior rejects non-minimal states") {
  const auto index = CliqueIndex::build(messages_from({{"a1", "s1"}, {"a1", "s1"}, {"a1", "s2"}}));
  const std::vector<std::int64_t> al{0, 1, 1};
  const std::vector<std::int64_t> cl{0, 0, 0};
  const auto state = ClusteringState::from_seating(index, al, cl);
  CHECK_THROWS_AS(log_posterior(state, index, ConcentrationParams(1.0, 1.0)), DomainError);
}

TEST_CASE("posterior matches the oracle and normalizes over minimal selectors") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> alpha(0.1, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto msgs = oracle::random_small_graph(rng, 6);
    const auto index = CliqueIndex::build(msgs);
    const double aa = alpha(rng);
    const double as = alpha(rng);
    const ConcentrationParams params(aa, as);
    const auto exact = oracle::exact_posterior(msgs, aa, as);

    double z = 0.0;
    for (const auto& [c, p] : exact) {
      z += std::exp(log_posterior(ClusteringState::from_clustering(index, c), index, params));
    }
    CHECK(std::isfinite(z));
    CHECK(z > 0.0);
    double total = 0.0;
    for (const auto& [c, p] : exact) {
      const double mine =
          std::exp(log_posterior(ClusteringState::from_clustering(index, c), index, params)) / z;
      CHECK(mine == doctest::Approx(p).epsilon(1e-9));
      total += mine;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}
