#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xshred/dtd.hpp"
#include "xshred/errors.hpp"

namespace xshred {

// Label returned by edge_label for the synthetic NULL parent of the root.
inline constexpr char kNoEdge = '\0';

struct DtdEdge {
  std::string parent;
  std::string child;
  char label;  // '1', '?' or '*' -- '+' never survives normalization
};

// Element-type graph derived from DTD content models. Immutable after
// build_graph; safe to share across threads.
class DtdGraph {
public:
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& root() const { return root_; }
  const std::vector<DtdEdge>& edges() const { return edges_; }

  bool has_node(const std::string& name) const { return node_set_.count(name) != 0; }

  bool is_leaf(const std::string& name) const {
    require_node(name);
    return leaves_.count(name) != 0;
  }

  // Leaf declared EMPTY rather than (#PCDATA).
  bool is_empty_leaf(const std::string& name) const {
    require_node(name);
    return empty_leaves_.count(name) != 0;
  }

  const std::vector<AttDef>& attributes_of(const std::string& name) const {
    require_node(name);
    static const std::vector<AttDef> empty;
    auto it = attrs_.find(name);
    return it == attrs_.end() ? empty : it->second;
  }

  // Distinct parent element types, ordered by parent declaration order.
  const std::vector<std::string>& parents_of(const std::string& name) const {
    require_node(name);
    static const std::vector<std::string> empty;
    auto it = parents_.find(name);
    return it == parents_.end() ? empty : it->second;
  }

  // Outgoing edges in declaration/content-model order.
  std::vector<const DtdEdge*> children_of(const std::string& name) const {
    require_node(name);
    std::vector<const DtdEdge*> out;
    auto it = out_edges_.find(name);
    if (it != out_edges_.end())
      for (std::size_t idx : it->second) out.push_back(&edges_[idx]);
    return out;
  }

  char label(const std::string& parent, const std::string& child) const {
    auto it = edge_label_.find(std::make_pair(parent, child));
    if (it == edge_label_.end()) throw NoSuchEdge(parent, child);
    return it->second;
  }

  bool has_edge(const std::string& parent, const std::string& child) const {
    return edge_label_.count(std::make_pair(parent, child)) != 0;
  }

  // True when the node can reach itself, i.e. lies on a cycle.
  bool on_cycle(const std::string& name) const {
    require_node(name);
    return on_cycle_.count(name) != 0;
  }

  friend DtdGraph build_graph(const DtdDecls& decls, const std::string& root, WarningList* warnings);

private:
  void require_node(const std::string& name) const {
    if (!has_node(name)) throw UndeclaredElement(name);
  }

  std::vector<std::string> nodes_;  // declaration order
  std::set<std::string> node_set_;
  std::string root_;
  std::vector<DtdEdge> edges_;
  std::map<std::pair<std::string, std::string>, char> edge_label_;
  std::map<std::string, std::vector<std::size_t>> out_edges_;
  std::map<std::string, std::vector<std::string>> parents_;
  std::map<std::string, std::vector<AttDef>> attrs_;
  std::set<std::string> leaves_;
  std::set<std::string> empty_leaves_;
  std::set<std::string> on_cycle_;
};

namespace detail {

struct ChildUse {
  int count = 0;
  bool starred = false;   // under '*' or '+' at any depth
  bool optional = false;  // under '?' or inside a choice group
};

inline void collect_child_uses(const ContentParticle& p, bool star_ctx, bool opt_ctx, bool choice_ctx,
                               std::vector<std::string>& order,
                               std::map<std::string, ChildUse>& uses) {
  bool star = star_ctx || p.occurrence == Occurrence::ZeroOrMore || p.occurrence == Occurrence::OneOrMore;
  bool opt = opt_ctx || p.occurrence == Occurrence::Optional;
  if (p.kind == ContentParticle::Kind::Element) {
    auto [it, inserted] = uses.try_emplace(p.name);
    if (inserted) order.push_back(p.name);
    it->second.count += 1;
    it->second.starred = it->second.starred || star;
    it->second.optional = it->second.optional || opt || choice_ctx;
    return;
  }
  bool choice = choice_ctx || p.kind == ContentParticle::Kind::Choice;
  for (const auto& child : p.children) collect_child_uses(child, star, opt, choice, order, uses);
}

}  // namespace detail

// Builds the labeled element-type graph. Effective cardinality per distinct
// child: '*' when the child sits under any '*'/'+' marker or appears more than
// once in the model, '?' when under '?' or inside a choice, else '1'. Edges on
// cycles are forced to '*' afterwards, so a single FK column in the parent is
// never asked to hold repeated children.
inline DtdGraph build_graph(const DtdDecls& decls, const std::string& root,
                            WarningList* warnings = nullptr) {
  DtdGraph g;
  for (const auto& decl : decls.elements) {
    if (!g.node_set_.insert(decl.name).second) throw DuplicateElementDecl(decl.name);
    g.nodes_.push_back(decl.name);
  }
  if (!g.node_set_.count(root)) throw MissingRoot(root);
  g.root_ = root;

  for (const auto& decl : decls.elements) {
    if (decl.content == ContentKind::PcdataLeaf || decl.content == ContentKind::Empty) {
      g.leaves_.insert(decl.name);
      if (decl.content == ContentKind::Empty) g.empty_leaves_.insert(decl.name);
      continue;
    }
    std::vector<std::string> order;
    std::map<std::string, detail::ChildUse> uses;
    detail::collect_child_uses(decl.model, false, false, false, order, uses);
    for (const auto& child : order) {
      if (!g.node_set_.count(child)) throw UndeclaredElement(child);
      const auto& use = uses.at(child);
      char label = '1';
      if (use.starred || use.count > 1)
        label = '*';
      else if (use.optional)
        label = '?';
      g.out_edges_[decl.name].push_back(g.edges_.size());
      g.edges_.push_back(DtdEdge{decl.name, child, label});
    }
  }

  for (const auto& attlist : decls.attlists) {
    if (!g.node_set_.count(attlist.element)) {
      warn(warnings, "ATTLIST for undeclared element '" + attlist.element + "' ignored");
      continue;
    }
    auto& merged = g.attrs_[attlist.element];
    for (const auto& att : attlist.attributes) {
      bool duplicate = false;
      for (const auto& existing : merged)
        if (existing.name == att.name) {
          duplicate = true;
          break;
        }
      if (duplicate) {
        warn(warnings, "duplicate attribute '" + att.name + "' on element '" + attlist.element +
                           "'; first declaration wins");
        continue;
      }
      merged.push_back(att);
    }
  }

  // Reachability over element types; graphs are small, so per-node DFS is fine.
  std::map<std::string, std::set<std::string>> reachable;
  for (const auto& node : g.nodes_) {
    auto& seen = reachable[node];
    std::vector<const std::string*> stack{&node};
    while (!stack.empty()) {
      const std::string* cur = stack.back();
      stack.pop_back();
      auto it = g.out_edges_.find(*cur);
      if (it == g.out_edges_.end()) continue;
      for (std::size_t idx : it->second) {
        const std::string& next = g.edges_[idx].child;
        if (seen.insert(next).second) stack.push_back(&next);
      }
    }
  }
  for (auto& edge : g.edges_)
    if (reachable[edge.child].count(edge.parent)) edge.label = '*';
  for (const auto& node : g.nodes_)
    if (reachable[node].count(node)) g.on_cycle_.insert(node);

  for (std::size_t i = 0; i < g.edges_.size(); ++i) {
    const auto& edge = g.edges_[i];
    g.edge_label_[{edge.parent, edge.child}] = edge.label;
    auto& parents = g.parents_[edge.child];
    if (std::find(parents.begin(), parents.end(), edge.parent) == parents.end())
      parents.push_back(edge.parent);
  }
  return g;
}

// Label of the (parent, child) DTD edge. A null parent stands for the
// synthetic parent of the root and yields kNoEdge.
inline char edge_label(const std::optional<std::string>& parent, const std::string& child,
                       const DtdGraph& g) {
  if (!parent) {
    if (child == g.root()) return kNoEdge;
    throw NoSuchEdge("(null)", child);
  }
  return g.label(*parent, child);
}

}  // namespace xshred
