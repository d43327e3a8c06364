#include "mgc/clustering.hpp"

#include <map>
#include <stdexcept>
#include <unordered_map>

namespace mgc {

Clustering Clustering::from_labels(std::span<const std::int64_t> labels) {
  Clustering out;
  out.labels_.reserve(labels.size());
  std::unordered_map<std::int64_t, ClusterLabel> remap;
  for (auto raw : labels) {
    auto [it, inserted] =
        remap.try_emplace(raw, static_cast<ClusterLabel>(remap.size()));
    out.labels_.push_back(it->second);
  }
  out.num_clusters_ = remap.size();
  return out;
}

Clustering Clustering::from_groups(std::size_t num_nodes,
                                   const std::vector<std::vector<NodeId>>& groups) {
  std::vector<std::int64_t> raw(num_nodes, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (NodeId node : groups[g]) {
      if (node >= num_nodes || raw[node] != -1) {
        throw std::invalid_argument("groups do not form a partition");
      }
      raw[node] = static_cast<std::int64_t>(g);
    }
  }
  for (auto v : raw) {
    if (v == -1) throw std::invalid_argument("groups do not cover every node");
  }
  return from_labels(raw);
}

Clustering Clustering::singletons(std::size_t num_nodes) {
  Clustering out;
  out.labels_.resize(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) out.labels_[i] = static_cast<ClusterLabel>(i);
  out.num_clusters_ = num_nodes;
  return out;
}

std::vector<std::vector<NodeId>> Clustering::groups() const {
  std::vector<std::vector<NodeId>> out(num_clusters_);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out[labels_[i]].push_back(static_cast<NodeId>(i));
  }
  return out;
}

std::vector<std::size_t> Clustering::sizes() const {
  std::vector<std::size_t> out(num_clusters_, 0);
  for (auto label : labels_) ++out[label];
  return out;
}

namespace {

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(const Clustering& a, const Clustering& b) {
  if (a.num_nodes() != b.num_nodes()) {
    throw std::invalid_argument("adjusted_rand_index: partitions differ in size");
  }
  const double n = static_cast<double>(a.num_nodes());
  std::map<std::pair<ClusterLabel, ClusterLabel>, std::size_t> joint;
  for (std::size_t i = 0; i < a.num_nodes(); ++i) {
    ++joint[{a[static_cast<NodeId>(i)], b[static_cast<NodeId>(i)]}];
  }
  double sum_joint = 0.0;
  for (const auto& [key, count] : joint) sum_joint += choose2(static_cast<double>(count));
  double sum_a = 0.0;
  for (auto s : a.sizes()) sum_a += choose2(static_cast<double>(s));
  double sum_b = 0.0;
  for (auto s : b.sizes()) sum_b += choose2(static_cast<double>(s));

  const double total = choose2(n);
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_joint - expected) / (max_index - expected);
}

}  // namespace mgc
