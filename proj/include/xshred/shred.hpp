#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "xshred/dom.hpp"
#include "xshred/dtd_graph.hpp"
#include "xshred/errors.hpp"
#include "xshred/schema.hpp"

namespace xshred {

// A cell is NULL (monostate), an EID, or text.
using Value = std::variant<std::monostate, long long, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

struct IdGenerator {
  long long next_id = 1;
  long long gen_id() { return next_id++; }
};

struct SinkReport {
  std::map<std::string, std::size_t> rows;  // table -> row count, every declared table present
  std::vector<std::string> files;           // paths created, if any
};

class Sink {
 public:
  virtual ~Sink() = default;
  virtual void write(const TableDef& table, const std::vector<Value>& row) = 0;
  virtual SinkReport finalize() = 0;
};

struct ShredStats {
  std::size_t q_enqueues = 0;   // non-inlinable instances entering the outer queue
  std::size_t r_enqueues = 0;   // instances entering the inner queue
  std::size_t tuples = 0;
  std::size_t edge_rows = 0;
  std::size_t elements = 0;     // from the document tree
  std::size_t attributes = 0;
};

namespace detail {

constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

struct ElementPlan {
  const TableDef* table = nullptr;
  bool inlinable = false;
  bool leaf = false;
  std::size_t id_col = kNoColumn;
  std::size_t node_type_col = kNoColumn;
  std::size_t parent_id_col = kNoColumn;
  std::size_t parent_type_col = kNoColumn;
  std::size_t value_col = kNoColumn;
  std::map<std::string, std::size_t> attr_cols;
  std::map<std::string, std::size_t> fk_cols;  // non-inlinable child element -> column
};

inline std::map<std::string, ElementPlan> build_plans(const DtdGraph& g,
                                                      const RelationalSchema& schema) {
  std::map<std::string, ElementPlan> plans;
  for (const auto& node : g.nodes()) {
    ElementPlan plan;
    plan.inlinable = is_inlinable(node, g);
    plan.leaf = g.is_leaf(node);
    plan.table = &schema.table_for_element(node);
    const TableDef& t = *plan.table;
    plan.id_col = t.role_index(ColumnRole::Id).value_or(kNoColumn);
    plan.node_type_col = t.role_index(ColumnRole::NodeType).value_or(kNoColumn);
    plan.parent_id_col = t.role_index(ColumnRole::ParentId).value_or(kNoColumn);
    plan.parent_type_col = t.role_index(ColumnRole::ParentType).value_or(kNoColumn);
    for (const auto& att : g.attributes_of(node)) {
      auto it = schema.mappings.theta.find({node, att.name});
      if (it == schema.mappings.theta.end()) throw MissingColumn(t.name, att.name);
      auto idx = t.column_index(it->second);
      if (!idx) throw MissingColumn(t.name, it->second);
      plan.attr_cols[att.name] = *idx;
    }
    if (plan.leaf) {
      auto it = schema.mappings.delta.find(node);
      if (it == schema.mappings.delta.end()) throw MissingColumn(t.name, node);
      auto idx = t.column_index(it->second);
      if (!idx) throw MissingColumn(t.name, it->second);
      plan.value_col = *idx;
    }
    for (const auto& [key, column] : schema.fk_columns) {
      if (key.first != node) continue;
      auto idx = t.column_index(column);
      if (!idx) throw MissingColumn(t.name, column);
      plan.fk_cols[key.second] = *idx;
    }
    plans[node] = std::move(plan);
  }
  return plans;
}

}  // namespace detail

// Breadth-first shredding of a document tree into relational tuples. The
// outer queue walks non-inlinable instances; for each, an inner queue sweeps
// its inlinable descendants into the same tuple and discovers the next
// non-inlinable frontier. Every instance passes through exactly one queue
// operation apiece, so the whole pass is linear in elements + attributes.
inline ShredStats xinsert(const DomTree& tree, const DtdGraph& g, const RelationalSchema& schema,
                          Sink& sink, IdGenerator* ids = nullptr,
                          WarningList* warnings = nullptr) {
  if (!tree.root) throw EmptyDocument();
  IdGenerator local_ids;
  IdGenerator& gen = ids ? *ids : local_ids;

  auto plans = detail::build_plans(g, schema);
  auto plan_of = [&](const std::string& name) -> const detail::ElementPlan& {
    auto it = plans.find(name);
    if (it == plans.end()) throw UnknownElement(name);
    return it->second;
  };

  ShredStats stats;
  stats.elements = tree.element_count;
  stats.attributes = tree.attribute_count;

  struct HostItem {
    const ElementNode* node;
    const ElementNode* dom_parent;  // immediate parent, for the edge label
    long long eid;
    long long parent_eid;           // enclosing host instance
    std::string parent_type;
  };
  struct SweepItem {
    const ElementNode* node;
    const ElementNode* dom_parent;
  };

  std::deque<HostItem> q;
  q.push_back({tree.root.get(), nullptr, gen.gen_id(), 0, ""});
  ++stats.q_enqueues;

  std::vector<Value> row;
  while (!q.empty()) {
    HostItem e = q.front();
    q.pop_front();
    const detail::ElementPlan& plan = plan_of(e.node->name);
    const TableDef& tb = *plan.table;

    row.assign(tb.columns.size(), Value{});
    row[plan.id_col] = e.eid;
    if (plan.node_type_col != detail::kNoColumn) row[plan.node_type_col] = e.node->name;

    for (const auto& [name, value] : e.node->attrs) {
      auto it = plan.attr_cols.find(name);
      if (it == plan.attr_cols.end()) {
        warn(warnings, "ignoring undeclared attribute '" + name + "' on '" + e.node->name + "'");
        continue;
      }
      row[it->second] = value;
    }
    if (plan.leaf) {
      if (e.node->value) row[plan.value_col] = *e.node->value;
    }
    if (!e.node->children.empty()) {
      std::deque<SweepItem> r;
      for (const auto& child : e.node->children) {
        r.push_back({child.get(), e.node});
        ++stats.r_enqueues;
      }
      while (!r.empty()) {
        SweepItem f = r.front();
        r.pop_front();
        const detail::ElementPlan& fplan = plan_of(f.node->name);
        if (!fplan.inlinable) {
          long long fid = gen.gen_id();
          if (g.label(f.dom_parent->name, f.node->name) != '*') {
            // The link column belongs to the closure member the child hangs
            // from; the cell still lives in the current host's row.
            const detail::ElementPlan& pplan = plan_of(f.dom_parent->name);
            auto it = pplan.fk_cols.find(f.node->name);
            if (it == pplan.fk_cols.end()) throw MissingColumn(tb.name, f.node->name + "_EID");
            if (!is_null(row[it->second]))
              throw DuplicateFkChild(f.dom_parent->name, f.node->name);
            row[it->second] = fid;
          }
          q.push_back({f.node, f.dom_parent, fid, e.eid, e.node->name});
          ++stats.q_enqueues;
        } else {
          for (const auto& [name, value] : f.node->attrs) {
            auto it = fplan.attr_cols.find(name);
            if (it == fplan.attr_cols.end()) {
              warn(warnings,
                   "ignoring undeclared attribute '" + name + "' on '" + f.node->name + "'");
              continue;
            }
            if (!is_null(row[it->second]))
              warn(warnings, "repeated inlined attribute '" + f.node->name + "." + name + "'");
            row[it->second] = value;
          }
          if (fplan.leaf) {
            if (!is_null(row[fplan.value_col]))
              warn(warnings, "repeated inlined leaf '" + f.node->name + "', last one wins");
            row[fplan.value_col] = f.node->value ? Value{*f.node->value} : Value{};
          }
          if (!f.node->children.empty()) {
            for (const auto& child : f.node->children) {
              r.push_back({child.get(), f.node});
              ++stats.r_enqueues;
            }
          }
        }
      }
    }

    bool star_child =
        e.dom_parent && g.label(e.dom_parent->name, e.node->name) == '*';
    if (schema.strategy == Strategy::Shared && star_child) {
      if (plan.parent_id_col == detail::kNoColumn || plan.parent_type_col == detail::kNoColumn)
        throw MissingColumn(tb.name, "parentID");
      row[plan.parent_id_col] = e.parent_eid;
      row[plan.parent_type_col] = e.parent_type;
    }

    sink.write(tb, row);
    ++stats.tuples;

    if (schema.strategy == Strategy::DtdMap && star_child) {
      row.assign(4, Value{});
      row[0] = e.parent_eid;
      row[1] = e.eid;
      row[2] = e.parent_type;
      row[3] = e.node->name;
      sink.write(*schema.edge_table, row);
      ++stats.edge_rows;
    }
  }
  return stats;
}

}  // namespace xshred
