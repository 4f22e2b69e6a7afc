#include "scpatcher/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "scpatcher/digest.hpp"

namespace scpatcher::kg {

namespace {
const std::vector<std::size_t> kNoEdges;
}

const EntityNode& PropertyGraph::node(std::string_view id) const {
  const auto it = nodes_.find(std::string(id));
  if (it == nodes_.end()) throw GraphError(GraphErrorKind::UnknownNode, "UnknownNode: " + std::string(id));
  return it->second;
}

const FunctionUnit* PropertyGraph::function(std::string_view id) const {
  const auto it = nodes_.find(std::string(id));
  if (it == nodes_.end() || !it->second.payload) return nullptr;
  return &*it->second.payload;
}

const std::vector<std::size_t>& PropertyGraph::out_edges(std::string_view id) const {
  const auto it = out_.find(std::string(id));
  return it == out_.end() ? kNoEdges : it->second;
}

const std::vector<std::size_t>& PropertyGraph::in_edges(std::string_view id) const {
  const auto it = in_.find(std::string(id));
  return it == in_.end() ? kNoEdges : it->second;
}

std::size_t PropertyGraph::in_degree(std::string_view id, Relation relation) const {
  const auto& in = in_edges(id);
  return static_cast<std::size_t>(
      std::count_if(in.begin(), in.end(), [&](std::size_t e) { return edges_[e].relation == relation; }));
}

std::vector<std::string> PropertyGraph::function_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, n] : nodes_) {
    if (n.kind == NodeKind::Function) ids.push_back(id);
  }
  return ids;
}

void PropertyGraph::add_node(const std::string& id, EntityNode node) {
  const auto it = nodes_.find(id);
  if (it != nodes_.end()) {
    if (it->second.kind != node.kind) {
      throw GraphError(GraphErrorKind::KindConflict, "KindConflict: node " + id + " declared as " +
                                                         std::string(to_string(it->second.kind)) + " and " +
                                                         std::string(to_string(node.kind)));
    }
    if (!it->second.payload && node.payload) it->second.payload = std::move(node.payload);
    return;
  }
  nodes_.emplace(id, std::move(node));
}

void PropertyGraph::add_edge(const Triple& t) { add_edges({t}); }

void PropertyGraph::add_edges(const std::vector<Triple>& triples) {
  for (const Triple& t : triples) {
    if (!well_typed(t)) {
      throw GraphError(GraphErrorKind::IllTyped, "IllTyped: " + t.subject.id + " " +
                                                     std::string(to_string(t.relation)) + " " + t.object.id);
    }
    for (const NodeRef* end : {&t.subject, &t.object}) {
      const auto it = nodes_.find(end->id);
      if (it == nodes_.end()) throw GraphError(GraphErrorKind::DanglingEndpoint, "DanglingEndpoint: " + end->id);
      if (it->second.kind != end->kind) {
        throw GraphError(GraphErrorKind::KindConflict, "KindConflict: edge endpoint " + end->id);
      }
    }
  }
  edges_.insert(edges_.end(), triples.begin(), triples.end());
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end(),
                           [](const Triple& x, const Triple& y) { return !(x < y) && !(y < x); }),
               edges_.end());
  rebuild_indexes();
}

void PropertyGraph::set_payload(const std::string& id, FunctionUnit unit) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw GraphError(GraphErrorKind::UnknownNode, "UnknownNode: " + id);
  it->second.payload = std::move(unit);
}

void PropertyGraph::rebuild_indexes() {
  out_.clear();
  in_.clear();
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    out_[edges_[e].subject.id].push_back(e);
    in_[edges_[e].object.id].push_back(e);
  }
}

bool PropertyGraph::indexes_consistent() const {
  PropertyGraph copy;
  copy.edges_ = edges_;
  copy.rebuild_indexes();
  return copy.out_ == out_ && copy.in_ == in_;
}

PropertyGraph build_graph(const std::vector<Triple>& triples, const std::vector<FunctionUnit>& functions) {
  PropertyGraph g;
  std::set<std::string> declared;
  for (const auto& f : functions) {
    if (declared.insert(f.id).second) g.add_node(f.id, EntityNode{NodeKind::Function, f});
  }
  std::set<Triple> unique;
  for (const Triple& t : triples) {
    if (!well_typed(t)) {
      throw GraphError(GraphErrorKind::IllTyped,
                       "IllTyped: " + t.subject.id + " " + std::string(to_string(t.relation)) + " " + t.object.id);
    }
    for (const NodeRef* end : {&t.subject, &t.object}) {
      if (end->kind == NodeKind::Function) {
        if (!declared.contains(end->id)) {
          throw GraphError(GraphErrorKind::DanglingEndpoint,
                           "DanglingEndpoint: function " + end->id + " has no FunctionUnit");
        }
      } else {
        g.add_node(end->id, EntityNode{end->kind, std::nullopt});
      }
    }
    unique.insert(t);
  }
  g.add_edges(std::vector<Triple>(unique.begin(), unique.end()));
  return g;
}

std::size_t CloneGroupTable::group_size(const std::optional<std::string>& clone_id) const {
  if (!clone_id) return 1;
  const auto it = groups.find(*clone_id);
  return it == groups.end() ? 1 : it->second.size();
}

std::string clone_id_for(const std::vector<std::string>& normalized_tokens) {
  std::string joined;
  for (std::size_t i = 0; i < normalized_tokens.size(); ++i) {
    if (i) joined.push_back(' ');
    joined += normalized_tokens[i];
  }
  return short_digest(joined);
}

CloneGroupTable assign_clone_groups(PropertyGraph& g, std::uint32_t clone_min_tokens) {
  CloneGroupTable table;
  table.clone_min_tokens = clone_min_tokens;
  for (const std::string& id : g.function_ids()) {
    const FunctionUnit* fu = g.function(id);
    if (!fu) throw GraphError(GraphErrorKind::UnknownNode, "function node without payload: " + id);
    FunctionUnit updated = *fu;
    const auto tokens = ingest::normalize_tokens(updated);
    updated.token_count = static_cast<std::uint32_t>(tokens.size());
    if (updated.token_count >= clone_min_tokens) {
      updated.clone_id = clone_id_for(tokens);
      table.groups[*updated.clone_id].push_back(id);
    } else {
      updated.clone_id.reset();
    }
    g.set_payload(id, std::move(updated));
  }
  for (auto& [cid, members] : table.groups) std::sort(members.begin(), members.end());
  return table;
}

PropertyGraph compute_guf(PropertyGraph g, const CloneGroupTable& clones) {
  for (const std::string& id : g.function_ids()) {
    FunctionUnit fu = *g.function(id);
    fu.guf = clones.group_size(fu.clone_id) + g.in_degree(id, Relation::Calls);
    g.set_payload(id, std::move(fu));
  }
  return g;
}

PropertyGraph neighborhood(const PropertyGraph& g, std::string_view id, std::size_t depth) {
  if (!g.contains(id)) throw GraphError(GraphErrorKind::UnknownNode, "UnknownNode: " + std::string(id));
  std::map<std::string, std::size_t> dist{{std::string(id), 0}};
  std::deque<std::string> frontier{std::string(id)};
  while (!frontier.empty()) {
    const std::string cur = frontier.front();
    frontier.pop_front();
    const std::size_t d = dist[cur];
    if (d == depth) continue;
    auto visit = [&](const std::string& next) {
      if (dist.emplace(next, d + 1).second) frontier.push_back(next);
    };
    for (std::size_t e : g.out_edges(cur)) visit(g.edges()[e].object.id);
    for (std::size_t e : g.in_edges(cur)) visit(g.edges()[e].subject.id);
  }
  PropertyGraph sub;
  for (const auto& [nid, d] : dist) sub.add_node(nid, g.node(nid));
  std::vector<Triple> kept;
  for (const Triple& t : g.edges()) {
    if (dist.contains(t.subject.id) && dist.contains(t.object.id)) kept.push_back(t);
  }
  sub.add_edges(kept);
  return sub;
}

}  // namespace scpatcher::kg
