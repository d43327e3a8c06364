#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mgc {

using NodeId = std::uint32_t;
using ClusterLabel = std::uint32_t;

/// A partition of the nodes 0..n-1, stored as one label per node.
///
/// Labels are canonical: cluster ids are assigned in order of first
/// occurrence when scanning nodes 0..n-1, so two equal partitions always
/// compare equal.
class Clustering {
 public:
  Clustering() = default;

  /// Relabels arbitrary integer labels into canonical form.
  static Clustering from_labels(std::span<const std::int64_t> labels);
  static Clustering from_groups(std::size_t num_nodes,
                                const std::vector<std::vector<NodeId>>& groups);
  static Clustering singletons(std::size_t num_nodes);

  std::size_t num_nodes() const noexcept { return labels_.size(); }
  std::size_t num_clusters() const noexcept { return num_clusters_; }
  ClusterLabel operator[](NodeId node) const { return labels_[node]; }
  const std::vector<ClusterLabel>& labels() const noexcept { return labels_; }

  /// Node sets, ordered by cluster label; each set is sorted ascending.
  std::vector<std::vector<NodeId>> groups() const;
  std::vector<std::size_t> sizes() const;

  friend bool operator==(const Clustering&, const Clustering&) = default;
  friend auto operator<=>(const Clustering& a, const Clustering& b) {
    return a.labels_ <=> b.labels_;
  }

 private:
  std::vector<ClusterLabel> labels_;
  std::size_t num_clusters_ = 0;
};

/// Adjusted Rand index between two partitions of the same node set.
/// Returns 1 when both partitions are trivial in the same way.
double adjusted_rand_index(const Clustering& a, const Clustering& b);

}  // namespace mgc
