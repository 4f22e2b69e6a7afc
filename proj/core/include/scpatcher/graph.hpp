#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scpatcher/error.hpp"
#include "scpatcher/ingest.hpp"
#include "scpatcher/model.hpp"

namespace scpatcher::kg {

using ingest::NodeKind;
using ingest::NodeRef;
using ingest::Relation;
using ingest::Triple;

enum class GraphErrorKind { DanglingEndpoint, UnknownNode, IllTyped, KindConflict };
using GraphError = KindedError<GraphErrorKind>;

struct EntityNode {
  NodeKind kind = NodeKind::Contract;
  std::optional<FunctionUnit> payload;  // present for Function nodes

  friend bool operator==(const EntityNode&, const EntityNode&) = default;
};

/// Typed property graph. Edges are kept sorted and duplicate-free; the
/// adjacency indexes are derived from the edge list and rebuilt on change.
class PropertyGraph {
 public:
  PropertyGraph() = default;

  const std::map<std::string, EntityNode>& nodes() const noexcept { return nodes_; }
  const std::vector<Triple>& edges() const noexcept { return edges_; }

  bool contains(std::string_view id) const { return nodes_.find(std::string(id)) != nodes_.end(); }
  const EntityNode& node(std::string_view id) const;
  const FunctionUnit* function(std::string_view id) const;

  /// Edge indices leaving / entering `id`.
  const std::vector<std::size_t>& out_edges(std::string_view id) const;
  const std::vector<std::size_t>& in_edges(std::string_view id) const;
  std::size_t in_degree(std::string_view id, Relation relation) const;

  /// Ids of all Function nodes, sorted.
  std::vector<std::string> function_ids() const;

  // Construction. Nodes must exist before edges reference them.
  void add_node(const std::string& id, EntityNode node);
  void add_edge(const Triple& t);
  void add_edges(const std::vector<Triple>& triples);
  void set_payload(const std::string& id, FunctionUnit unit);

  /// Rebuilds the adjacency indexes from scratch and compares them with the
  /// maintained ones.
  bool indexes_consistent() const;

  friend bool operator==(const PropertyGraph& a, const PropertyGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  void rebuild_indexes();

  std::map<std::string, EntityNode> nodes_;
  std::vector<Triple> edges_;
  std::map<std::string, std::vector<std::size_t>> out_;
  std::map<std::string, std::vector<std::size_t>> in_;
};

/// Node set = triple endpoints plus every function. Function-kind endpoints
/// must be among `functions`; duplicate triples and duplicate function ids
/// collapse.
PropertyGraph build_graph(const std::vector<Triple>& triples, const std::vector<FunctionUnit>& functions);

inline constexpr std::uint32_t kDefaultCloneMinTokens = 12;

struct CloneGroupTable {
  std::uint32_t clone_min_tokens = kDefaultCloneMinTokens;
  std::map<std::string, std::vector<std::string>> groups;  // clone id -> sorted function ids

  std::size_t group_size(const std::optional<std::string>& clone_id) const;

  friend bool operator==(const CloneGroupTable&, const CloneGroupTable&) = default;
};

/// clone id = short digest of the normalized token stream.
std::string clone_id_for(const std::vector<std::string>& normalized_tokens);

/// Groups functions by normalized token stream and writes clone_id into
/// every payload (absent below the threshold).
CloneGroupTable assign_clone_groups(PropertyGraph& g, std::uint32_t clone_min_tokens = kDefaultCloneMinTokens);

/// guf(d) = |clone group of d| (1 when ungrouped) + CALLS in-degree of d.
PropertyGraph compute_guf(PropertyGraph g, const CloneGroupTable& clones);

/// Undirected BFS over every relation up to `depth`; returns the induced subgraph.
PropertyGraph neighborhood(const PropertyGraph& g, std::string_view id, std::size_t depth);

}  // namespace scpatcher::kg
