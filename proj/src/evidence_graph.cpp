#include "mgc/evidence_graph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "mgc/errors.hpp"

namespace mgc {

CliqueIndex CliqueIndex::build(std::span<const MessageRecord> messages) {
  if (messages.empty()) throw DataError("cannot build an evidence graph from zero messages");

  const std::size_t n = messages.size();
  std::vector<const MessageRecord*> by_node(n, nullptr);
  for (const auto& m : messages) {
    if (m.node_id >= n) {
      throw DataError("node ids must be contiguous from 0; got " + std::to_string(m.node_id) +
                      " with " + std::to_string(n) + " messages");
    }
    if (by_node[m.node_id] != nullptr) {
      throw DataError("duplicate node id " + std::to_string(m.node_id));
    }
    if (m.address_id.empty() || m.campaign_id.empty()) {
      throw DataError("message " + std::to_string(m.node_id) + " has an empty address or campaign");
    }
    by_node[m.node_id] = &m;
  }

  CliqueIndex index;
  index.node_cliques_.resize(n);
  std::unordered_map<std::string, CliqueId> address_cliques;
  std::unordered_map<std::string, CliqueId> campaign_cliques;

  auto seat = [&](std::unordered_map<std::string, CliqueId>& lookup, CliqueKind kind,
                  const std::string& key, NodeId node) {
    auto [it, inserted] = lookup.try_emplace(key, static_cast<CliqueId>(index.cliques_.size()));
    if (inserted) index.cliques_.push_back(Clique{kind, key, {}});
    index.cliques_[it->second].members.push_back(node);
    index.node_cliques_[node][slot(kind)] = it->second;
  };

  for (NodeId node = 0; node < n; ++node) {
    const auto& m = *by_node[node];
    seat(address_cliques, CliqueKind::kAddress, m.address_id, node);
    seat(campaign_cliques, CliqueKind::kCampaign, m.campaign_id, node);
  }
  return index;
}

bool CliqueIndex::adjacent(NodeId i, NodeId j) const {
  if (i >= num_nodes() || j >= num_nodes()) throw std::out_of_range("adjacent: node id out of range");
  if (i == j) return true;
  const auto& a = node_cliques_[i];
  const auto& b = node_cliques_[j];
  return a[0] == b[0] || a[1] == b[1];
}

namespace {

constexpr ComponentId kUnassigned = std::numeric_limits<ComponentId>::max();

}  // namespace

ClusteringState ClusteringState::singletons(const CliqueIndex& index) {
  ClusteringState state;
  state.clique_tables_.resize(index.num_cliques());
  state.node_tables_.assign(index.num_nodes(), {kNoTable, kNoTable});
  for (NodeId node = 0; node < index.num_nodes(); ++node) {
    state.attach(index, node, kNoTable, kNoTable);
  }
  return state;
}

ClusteringState ClusteringState::from_seating(const CliqueIndex& index,
                                              std::span<const std::int64_t> address_labels,
                                              std::span<const std::int64_t> campaign_labels) {
  const std::size_t n = index.num_nodes();
  if (address_labels.size() != n || campaign_labels.size() != n) {
    throw std::invalid_argument("from_seating: one label per node is required");
  }
  ClusteringState state;
  state.clique_tables_.resize(index.num_cliques());
  state.node_tables_.assign(n, {kNoTable, kNoTable});

  for (CliqueId q = 0; q < index.num_cliques(); ++q) {
    const Clique& clique = index.clique(q);
    const auto labels = clique.kind == CliqueKind::kAddress ? address_labels : campaign_labels;
    std::map<std::int64_t, TableId> by_label;
    for (NodeId node : clique.members) {
      auto [it, inserted] = by_label.try_emplace(labels[node], kNoTable);
      if (inserted) it->second = state.new_table(q, clique.kind);
      state.tables_[it->second].members.push_back(node);
      state.node_tables_[node][slot(clique.kind)] = it->second;
    }
  }
  state.rebuild_all_components();
  return state;
}

ClusteringState ClusteringState::from_clustering(const CliqueIndex& index,
                                                 const Clustering& clustering) {
  if (clustering.num_nodes() != index.num_nodes()) {
    throw std::invalid_argument("from_clustering: clustering size does not match the graph");
  }
  std::vector<std::int64_t> labels(clustering.labels().begin(), clustering.labels().end());
  return from_seating(index, labels, labels);
}

std::vector<std::size_t> ClusteringState::table_sizes(CliqueId q) const {
  std::vector<std::size_t> sizes;
  const auto& ids = clique_tables_.at(q);
  sizes.reserve(ids.size());
  for (TableId t : ids) sizes.push_back(tables_[t].members.size());
  return sizes;
}

TableId ClusteringState::new_table(CliqueId clique, CliqueKind kind) {
  TableId t;
  if (!free_tables_.empty()) {
    t = free_tables_.back();
    free_tables_.pop_back();
  } else {
    t = static_cast<TableId>(tables_.size());
    tables_.emplace_back();
  }
  tables_[t] = Table{clique, kind, kUnassigned, {}};
  clique_tables_[clique].push_back(t);
  ++live_tables_;
  return t;
}

void ClusteringState::drop_table(TableId t) {
  Table& table = tables_[t];
  std::erase(clique_tables_[table.clique], t);
  if (table.component != kUnassigned) {
    auto& comp = components_[table.component];
    std::erase(comp, t);
    if (comp.empty()) {
      free_components_.push_back(table.component);
      --live_components_;
    }
  }
  table.members.clear();
  table.component = kUnassigned;
  free_tables_.push_back(t);
  --live_tables_;
}

ComponentId ClusteringState::new_component() {
  ComponentId c;
  if (!free_components_.empty()) {
    c = free_components_.back();
    free_components_.pop_back();
  } else {
    c = static_cast<ComponentId>(components_.size());
    components_.emplace_back();
  }
  components_[c].clear();
  ++live_components_;
  return c;
}

void ClusteringState::merge_components(ComponentId keep, ComponentId absorb) {
  if (components_[keep].size() < components_[absorb].size() ||
      (components_[keep].size() == components_[absorb].size() && absorb < keep)) {
    std::swap(keep, absorb);
  }
  for (TableId t : components_[absorb]) {
    tables_[t].component = keep;
    components_[keep].push_back(t);
  }
  components_[absorb].clear();
  free_components_.push_back(absorb);
  --live_components_;
}

void ClusteringState::rebuild_component(ComponentId c) {
  std::vector<TableId> pending = std::move(components_[c]);
  components_[c].clear();
  for (TableId t : pending) tables_[t].component = kUnassigned;

  bool first = true;
  std::vector<TableId> stack;
  for (TableId root : pending) {
    if (tables_[root].component != kUnassigned) continue;
    const ComponentId target = first ? c : new_component();
    first = false;
    tables_[root].component = target;
    stack.push_back(root);
    while (!stack.empty()) {
      const TableId t = stack.back();
      stack.pop_back();
      components_[target].push_back(t);
      const std::size_t other = 1 - slot(tables_[t].kind);
      for (NodeId member : tables_[t].members) {
        const TableId next = node_tables_[member][other];
        if (next != kNoTable && tables_[next].component == kUnassigned) {
          tables_[next].component = target;
          stack.push_back(next);
        }
      }
    }
  }
}

void ClusteringState::rebuild_all_components() {
  components_.clear();
  free_components_.clear();
  live_components_ = 0;
  std::vector<TableId> all;
  for (TableId t = 0; t < tables_.size(); ++t) {
    if (!tables_[t].members.empty()) {
      tables_[t].component = kUnassigned;
      all.push_back(t);
    }
  }
  if (all.empty()) return;
  const ComponentId c = new_component();
  components_[c] = std::move(all);
  rebuild_component(c);
}

void ClusteringState::detach(NodeId node) {
  auto& seats = node_tables_.at(node);
  if (seats[0] == kNoTable) return;
  const TableId address_table = seats[0];
  const TableId campaign_table = seats[1];
  const ComponentId c = tables_[address_table].component;
  seats = {kNoTable, kNoTable};

  for (TableId t : {address_table, campaign_table}) {
    std::erase(tables_[t].members, node);
    if (tables_[t].members.empty()) drop_table(t);
  }
  if (!components_[c].empty()) rebuild_component(c);
}

void ClusteringState::attach(const CliqueIndex& index, NodeId node, TableId address_table,
                             TableId campaign_table) {
  if (attached(node)) throw std::logic_error("attach: node is already seated");
  std::array<TableId, 2> chosen{address_table, campaign_table};
  for (CliqueKind kind : {CliqueKind::kAddress, CliqueKind::kCampaign}) {
    const CliqueId q = index.clique_of(node, kind);
    TableId& t = chosen[slot(kind)];
    if (t == kNoTable) {
      t = new_table(q, kind);
      const ComponentId c = new_component();
      tables_[t].component = c;
      components_[c].push_back(t);
    } else if (!table_live(t) || tables_[t].clique != q) {
      throw std::invalid_argument("attach: table does not belong to the node's clique");
    }
    auto& members = tables_[t].members;
    members.insert(std::lower_bound(members.begin(), members.end(), node), node);
  }
  node_tables_[node] = chosen;
  const ComponentId ca = tables_[chosen[0]].component;
  const ComponentId cs = tables_[chosen[1]].component;
  if (ca != cs) merge_components(ca, cs);
}

std::vector<ComponentId> ClusteringState::component_ids() const {
  std::vector<ComponentId> ids;
  for (ComponentId c = 0; c < components_.size(); ++c) {
    if (!components_[c].empty()) ids.push_back(c);
  }
  return ids;
}

namespace {

// Per node and kind, the smallest member of its table: a layout-independent
// encoding of the seating.
std::vector<std::array<NodeId, 2>> seating_signature(const ClusteringState& state) {
  std::vector<std::array<NodeId, 2>> sig(state.num_nodes());
  for (NodeId node = 0; node < state.num_nodes(); ++node) {
    for (CliqueKind kind : {CliqueKind::kAddress, CliqueKind::kCampaign}) {
      const TableId t = state.table_of(node, kind);
      sig[node][slot(kind)] = t == kNoTable ? std::numeric_limits<NodeId>::max()
                                            : state.table(t).members.front();
    }
  }
  return sig;
}

}  // namespace

bool operator==(const ClusteringState& a, const ClusteringState& b) {
  return a.num_nodes() == b.num_nodes() && seating_signature(a) == seating_signature(b);
}

Clustering global_clusters(const ClusteringState& state) {
  std::vector<std::vector<NodeId>> groups;
  for (ComponentId c : state.component_ids()) {
    std::vector<NodeId> nodes;
    for (TableId t : state.component_tables(c)) {
      const auto& table = state.table(t);
      if (table.kind == CliqueKind::kAddress) {
        nodes.insert(nodes.end(), table.members.begin(), table.members.end());
      }
    }
    groups.push_back(std::move(nodes));
  }
  return Clustering::from_groups(state.num_nodes(), groups);
}

bool is_minimal(const ClusteringState& state) {
  std::vector<CliqueId> cliques;
  for (ComponentId c : state.component_ids()) {
    cliques.clear();
    for (TableId t : state.component_tables(c)) cliques.push_back(state.table(t).clique);
    std::sort(cliques.begin(), cliques.end());
    if (std::adjacent_find(cliques.begin(), cliques.end()) != cliques.end()) return false;
  }
  return true;
}

}  // namespace mgc
