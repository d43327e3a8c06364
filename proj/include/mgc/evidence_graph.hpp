#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mgc/clustering.hpp"

namespace mgc {

using CliqueId = std::uint32_t;
using TableId = std::uint32_t;
using ComponentId = std::uint32_t;

inline constexpr TableId kNoTable = std::numeric_limits<TableId>::max();

struct MessageRecord {
  NodeId node_id = 0;
  std::string address_id;
  std::string campaign_id;
  std::int64_t timestamp = 0;

  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

enum class CliqueKind : std::uint8_t { kAddress = 0, kCampaign = 1 };

/// Slot of a clique kind in per-node arrays (address first, campaign second).
constexpr std::size_t slot(CliqueKind kind) noexcept { return static_cast<std::size_t>(kind); }

struct Clique {
  CliqueKind kind = CliqueKind::kAddress;
  std::string key;  // address_id or campaign_id
  std::vector<NodeId> members;  // ascending

  friend bool operator==(const Clique&, const Clique&) = default;
};

/// The evidence graph X stored as its cliques: one per distinct address and
/// one per distinct campaign. Every node belongs to exactly one clique of each
/// kind; adjacency is derived on demand.
class CliqueIndex {
 public:
  /// Throws DataError on duplicate or non-contiguous node ids, empty ids, or
  /// an empty message list.
  static CliqueIndex build(std::span<const MessageRecord> messages);

  std::size_t num_nodes() const noexcept { return node_cliques_.size(); }
  std::size_t num_cliques() const noexcept { return cliques_.size(); }

  const Clique& clique(CliqueId q) const { return cliques_.at(q); }
  const std::vector<Clique>& cliques() const noexcept { return cliques_; }

  /// {address clique, campaign clique} of a node.
  const std::array<CliqueId, 2>& cliques_of(NodeId node) const { return node_cliques_.at(node); }
  CliqueId clique_of(NodeId node, CliqueKind kind) const { return cliques_of(node)[slot(kind)]; }

  /// X_ij: true iff i == j or the nodes share a clique. Throws
  /// std::out_of_range for invalid ids.
  bool adjacent(NodeId i, NodeId j) const;

  friend bool operator==(const CliqueIndex&, const CliqueIndex&) = default;

 private:
  std::vector<Clique> cliques_;
  std::vector<std::array<CliqueId, 2>> node_cliques_;
};

/// A minimal clustering of the evidence graph, held as per-clique seatings.
///
/// Each clique is partitioned into tables; a node sits at one table in its
/// address clique and one in its campaign clique. Tables sharing a node are
/// connected, and the connected components of tables are the global clusters.
/// The implied selector has Y_ij = 1 iff i and j share a table.
///
/// A state is minimal when no component holds two tables of the same clique.
/// Under that condition the seating is the canonical encoding of its selector
/// matrix, and the per-clique partitions are the projections of the global
/// clustering onto each clique.
class ClusteringState {
 public:
  struct Table {
    CliqueId clique = 0;
    CliqueKind kind = CliqueKind::kAddress;
    ComponentId component = 0;
    std::vector<NodeId> members;
  };

  /// Every node alone at its own table in each of its cliques.
  static ClusteringState singletons(const CliqueIndex& index);

  /// Seating given by per-node table labels inside each clique: two nodes of
  /// the same clique share a table iff their labels for that kind match.
  /// The result may be non-minimal.
  static ClusteringState from_seating(const CliqueIndex& index,
                                      std::span<const std::int64_t> address_labels,
                                      std::span<const std::int64_t> campaign_labels);

  /// Projects a global clustering onto every clique. Always minimal; its
  /// global clusters refine `clustering` into evidence-connected pieces.
  static ClusteringState from_clustering(const CliqueIndex& index, const Clustering& clustering);

  std::size_t num_nodes() const noexcept { return node_tables_.size(); }
  std::size_t num_tables() const noexcept { return live_tables_; }
  std::size_t num_components() const noexcept { return live_components_; }

  const Table& table(TableId t) const { return tables_.at(t); }
  bool table_live(TableId t) const noexcept { return t < tables_.size() && !tables_[t].members.empty(); }
  const std::vector<TableId>& tables_of_clique(CliqueId q) const { return clique_tables_.at(q); }
  const std::vector<TableId>& component_tables(ComponentId c) const { return components_.at(c); }
  TableId table_of(NodeId node, CliqueKind kind) const { return node_tables_.at(node)[slot(kind)]; }
  bool attached(NodeId node) const { return node_tables_.at(node)[0] != kNoTable; }

  /// Table sizes of one clique (order follows tables_of_clique).
  std::vector<std::size_t> table_sizes(CliqueId q) const;

  /// Removes a node from both of its tables, dropping emptied tables and
  /// splitting the component if it falls apart. No-op if already detached.
  void detach(NodeId node);

  /// Seats a detached node. kNoTable opens a new table in that clique.
  void attach(const CliqueIndex& index, NodeId node, TableId address_table, TableId campaign_table);

  /// Component ids currently in use, ascending.
  std::vector<ComponentId> component_ids() const;

  friend bool operator==(const ClusteringState& a, const ClusteringState& b);

 private:
  ClusteringState() = default;

  TableId new_table(CliqueId clique, CliqueKind kind);
  void drop_table(TableId t);
  ComponentId new_component();
  void rebuild_component(ComponentId c);
  void merge_components(ComponentId keep, ComponentId absorb);
  void rebuild_all_components();

  std::vector<Table> tables_;
  std::vector<TableId> free_tables_;
  std::size_t live_tables_ = 0;

  std::vector<std::vector<TableId>> clique_tables_;
  std::vector<std::array<TableId, 2>> node_tables_;

  std::vector<std::vector<TableId>> components_;
  std::vector<ComponentId> free_components_;
  std::size_t live_components_ = 0;
};

/// Nodes of each component, as a canonical clustering.
/// Every node must be attached.
Clustering global_clusters(const ClusteringState& state);

/// True iff no component contains two distinct tables of the same clique.
bool is_minimal(const ClusteringState& state);

}  // namespace mgc
