#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xshred/dtd_graph.hpp"
#include "xshred/errors.hpp"

namespace xshred {

enum class Strategy { DtdMap, Shared };

inline const char* to_string(Strategy s) { return s == Strategy::DtdMap ? "dtdmap" : "shared"; }

enum class ColumnRole {
  Id,
  NodeType,
  ParentId,    // Shared strategy parent link
  ParentType,  // Shared strategy parent link
  XmlAttr,
  LeafValue,
  FkEid,
  EdgeParentId,
  EdgeChildId,
  EdgeParentType,
  EdgeChildType,
};

inline bool is_integer_column(ColumnRole role) {
  return role == ColumnRole::Id || role == ColumnRole::FkEid || role == ColumnRole::ParentId ||
         role == ColumnRole::EdgeParentId || role == ColumnRole::EdgeChildId;
}

struct Column {
  std::string name;
  ColumnRole role;
  std::string source_element;  // XmlAttr / LeafValue / FkEid
  std::string source_attr;     // XmlAttr
};

struct TableDef {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::string> hosts;  // host element first, inlined elements in depth-first order

  std::optional<std::size_t> column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == column) return i;
    return std::nullopt;
  }

  std::optional<std::size_t> role_index(ColumnRole role) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].role == role) return i;
    return std::nullopt;
  }
};

// The sigma/theta/delta mapping functions of the schema mapping phase.
// sigma is total over all element types: inlinable elements map to their
// host's table.
struct MappingTriple {
  std::map<std::string, std::string> sigma;                            // element -> table
  std::map<std::pair<std::string, std::string>, std::string> theta;    // (element, attr) -> column
  std::map<std::string, std::string> delta;                            // leaf element -> column
};

struct RelationalSchema {
  Strategy strategy = Strategy::DtdMap;
  std::vector<TableDef> tables;          // one per non-inlinable element, declaration order
  std::optional<TableDef> edge_table;    // DtdMap only
  MappingTriple mappings;
  // (closure member element, non-inlinable child element) -> FK column in the
  // member's table carrying the child's EID. Keyed by member, not table: two
  // members of one closure can each have the same child, and a conforming
  // document can populate both links in a single row.
  std::map<std::pair<std::string, std::string>, std::string> fk_columns;

  const TableDef* find_table(std::string_view name) const {
    for (const auto& t : tables)
      if (t.name == name) return &t;
    if (edge_table && edge_table->name == name) return &*edge_table;
    return nullptr;
  }

  const TableDef& table_for_element(const std::string& element) const {
    auto it = mappings.sigma.find(element);
    if (it == mappings.sigma.end()) throw UnknownElement(element);
    const TableDef* t = find_table(it->second);
    if (!t) throw UnknownTable(it->second);
    return *t;
  }
};

// A node is inlinable when it has exactly one parent type, the incoming edge
// is '1' or '?', and it does not lie on a cycle. The root is never inlinable.
inline bool is_inlinable(const std::string& node, const DtdGraph& g) {
  if (node == g.root()) return false;
  const auto& parents = g.parents_of(node);
  if (parents.size() != 1) return false;
  char label = g.label(parents.front(), node);
  if (label != '1' && label != '?') return false;
  return !g.on_cycle(node);
}

inline const std::set<std::string>& default_reserved_words() {
  static const std::set<std::string> words = {
      "all",     "alter",   "and",        "as",       "between", "by",      "case",    "char",
      "check",   "constraint", "create",  "date",     "default", "delete",  "distinct", "drop",
      "else",    "end",     "exists",     "foreign",  "from",    "group",   "having",  "in",
      "index",   "inner",   "insert",     "integer",  "into",    "is",      "join",    "key",
      "left",    "like",    "not",        "null",     "number",  "on",      "or",      "order",
      "outer",   "primary", "references", "right",    "select",  "table",   "text",    "then",
      "time",    "timestamp", "union",    "unique",   "update",  "values",  "varchar", "when",
      "where"};
  return words;
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline bool name_taken(const std::string& candidate, const std::set<std::string>& taken,
                       const std::set<std::string>& reserved) {
  // Case-insensitive on both sides: SQL identifiers fold case.
  std::string lowered = ascii_lower(candidate);
  if (reserved.count(lowered)) return true;
  for (const auto& t : taken)
    if (ascii_lower(t) == lowered) return true;
  return false;
}

inline std::string capitalize(std::string name) {
  if (!name.empty() && name[0] >= 'a' && name[0] <= 'z')
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return name;
}

}  // namespace detail

// Returns `proposed` when it is free, otherwise "<host>_<proposed>", then
// numbered variants until unique. Reserved-word comparison is
// case-insensitive.
inline std::string resolve_name(const std::string& proposed, const std::set<std::string>& taken,
                                const std::set<std::string>& reserved, const std::string& host) {
  if (!detail::name_taken(proposed, taken, reserved)) return proposed;
  std::string base = host + "_" + proposed;
  if (!detail::name_taken(base, taken, reserved)) return base;
  for (int k = 2;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (!detail::name_taken(candidate, taken, reserved)) return candidate;
  }
}

namespace detail {

// Inlined closure of a host: the host plus every inlinable element whose
// parent chain ends at the host, in depth-first edge order.
inline std::vector<std::string> inlined_closure(const std::string& host, const DtdGraph& g) {
  std::vector<std::string> closure{host};
  std::vector<std::string> stack{host};
  while (!stack.empty()) {
    std::string current = stack.back();
    stack.pop_back();
    // Push in reverse so the pop order matches declaration order.
    auto children = g.children_of(current);
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      if (!is_inlinable((*it)->child, g)) continue;
      stack.push_back((*it)->child);
    }
    if (current != host) closure.push_back(current);
  }
  return closure;
}

}  // namespace detail

// Generates the relational schema plus sigma/theta/delta for the chosen
// strategy. DtdMap links '*'-children through the global Edge table; Shared
// gives every possible '*'-child table its own parentID/parentType columns
// instead.
inline RelationalSchema map_schema(const DtdGraph& g, Strategy strategy) {
  RelationalSchema schema;
  schema.strategy = strategy;
  const auto& reserved = default_reserved_words();

  std::vector<std::string> hosts;
  for (const auto& node : g.nodes())
    if (!is_inlinable(node, g)) hosts.push_back(node);

  std::set<std::string> taken_tables;
  if (strategy == Strategy::DtdMap) taken_tables.insert("Edge");

  for (const auto& host : hosts) {
    TableDef table;
    table.name = resolve_name(detail::capitalize(host), taken_tables, reserved, host);
    taken_tables.insert(table.name);
    table.hosts = detail::inlined_closure(host, g);

    std::set<std::string> taken;
    auto add_column = [&](std::string name, ColumnRole role, std::string source_element = "",
                          std::string source_attr = "") {
      taken.insert(name);
      table.columns.push_back(Column{std::move(name), role, std::move(source_element),
                                     std::move(source_attr)});
      return table.columns.back().name;
    };

    add_column("ID", ColumnRole::Id);
    bool wants_node_type = host == g.root() || g.parents_of(host).size() > 1;
    if (wants_node_type) add_column("nodeType", ColumnRole::NodeType);
    if (strategy == Strategy::Shared) {
      bool star_child = false;
      for (const auto& parent : g.parents_of(host))
        if (g.label(parent, host) == '*') star_child = true;
      if (star_child) {
        add_column("parentID", ColumnRole::ParentId);
        add_column("parentType", ColumnRole::ParentType);
      }
    }

    for (const auto& member : table.hosts) {
      for (const auto& att : g.attributes_of(member)) {
        std::string column = resolve_name(att.name, taken, reserved, member);
        add_column(column, ColumnRole::XmlAttr, member, att.name);
        schema.mappings.theta[{member, att.name}] = column;
      }
      if (g.is_leaf(member)) {
        // An inlined leaf keeps its own name; a leaf hosting its own table
        // stores its text in "<name>_value".
        std::string proposed = member == host ? member + "_value" : member;
        std::string column = resolve_name(proposed, taken, reserved, member);
        add_column(column, ColumnRole::LeafValue, member);
        schema.mappings.delta[member] = column;
      }
    }

    for (const auto& member : table.hosts) {
      for (const auto* edge : g.children_of(member)) {
        if (edge->label == '*') continue;
        if (is_inlinable(edge->child, g)) continue;
        std::string column = resolve_name(edge->child + "_EID", taken, reserved, member);
        add_column(column, ColumnRole::FkEid, edge->child);
        schema.fk_columns[{member, edge->child}] = column;
      }
    }

    for (const auto& member : table.hosts) schema.mappings.sigma[member] = table.name;
    schema.tables.push_back(std::move(table));
  }

  if (strategy == Strategy::DtdMap) {
    TableDef edge;
    edge.name = "Edge";
    edge.columns = {Column{"parentID", ColumnRole::EdgeParentId, "", ""},
                    Column{"childID", ColumnRole::EdgeChildId, "", ""},
                    Column{"parentType", ColumnRole::EdgeParentType, "", ""},
                    Column{"childType", ColumnRole::EdgeChildType, "", ""}};
    schema.edge_table = std::move(edge);
  }
  return schema;
}

// One CREATE TABLE statement per line. ID-like columns are INTEGER, the rest
// VARCHAR(255).
inline std::string emit_ddl(const RelationalSchema& schema) {
  std::string out;
  auto emit_table = [&](const TableDef& table) {
    out += "CREATE TABLE " + table.name + " (";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out += ", ";
      out += table.columns[i].name;
      out += is_integer_column(table.columns[i].role) ? " INTEGER" : " VARCHAR(255)";
    }
    out += ");\n";
  };
  for (const auto& table : schema.tables) emit_table(table);
  if (schema.edge_table) emit_table(*schema.edge_table);
  return out;
}

}  // namespace xshred
