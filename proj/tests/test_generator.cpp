#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>

#include "xshred/dom.hpp"
#include "xshred/emit.hpp"
#include "xshred/generator.hpp"
#include "xshred/shred.hpp"

using namespace xshred;

namespace {

DtdGraph univ_graph() {
  return build_graph(parse_dtd_file(std::string(SAMPLES_DIR) + "/univ.dtd"), "univ");
}

// Walks the tree and checks it against the DTD graph: edges exist, child
// multiplicities respect the labels, attributes are declared and required
// ones are present.
void check_conforms(const ElementNode& node, const DtdGraph& g) {
  std::map<std::string, std::size_t> child_counts;
  for (const auto& child : node.children) {
    REQUIRE(g.has_edge(node.name, child->name));
    ++child_counts[child->name];
    check_conforms(*child, g);
  }
  for (const auto* edge : g.children_of(node.name)) {
    std::size_t n = child_counts.count(edge->child) ? child_counts[edge->child] : 0;
    if (edge->label == '1') CHECK(n == 1);
    if (edge->label == '?') CHECK(n <= 1);
  }
  for (const auto& [name, count] : child_counts) CHECK(g.has_edge(node.name, name));

  std::map<std::string, std::size_t> attr_counts;
  for (const auto& [name, value] : node.attrs) ++attr_counts[name];
  const auto& declared = g.attributes_of(node.name);
  for (const auto& [name, count] : attr_counts) {
    bool known = std::any_of(declared.begin(), declared.end(),
                             [&](const AttDef& a) { return a.name == name; });
    CHECK(known);
  }
  for (const auto& att : declared)
    if (att.default_kind == AttDefaultKind::Required) CHECK(attr_counts.count(att.name) == 1);
}

std::size_t count_non_inlinable(const ElementNode& node, const DtdGraph& g) {
  std::size_t n = is_inlinable(node.name, g) ? 0 : 1;
  for (const auto& child : node.children) n += count_non_inlinable(*child, g);
  return n;
}

using PairMultiset = std::multiset<std::pair<std::string, std::string>>;

PairMultiset record_attrs(const GenRecord& r) {
  return PairMultiset(r.attr_values.begin(), r.attr_values.end());
}

PairMultiset record_leaves(const GenRecord& r) {
  return PairMultiset(r.leaf_values.begin(), r.leaf_values.end());
}

// Non-NULL attribute and leaf cells of a shredded document, keyed the same
// way the generator records what it embedded.
void collect_cells(const MemorySink& sink, const RelationalSchema& schema, PairMultiset& attrs,
                   PairMultiset& leaves) {
  for (const auto& table : schema.tables) {
    const auto& rows = sink.tables().at(table.name);
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const Column& col = table.columns[c];
        if (is_null(row[c])) continue;
        if (col.role == ColumnRole::XmlAttr)
          attrs.emplace(col.source_attr, std::get<std::string>(row[c]));
        else if (col.role == ColumnRole::LeafValue)
          leaves.emplace(col.source_element, std::get<std::string>(row[c]));
      }
    }
  }
}

}  // namespace

TEST_CASE("generation is deterministic") {
  DtdGraph g = univ_graph();
  std::string a = generate_document(g, 8192, 42);
  std::string b = generate_document(g, 8192, 42);
  CHECK(a == b);
  std::string c = generate_document(g, 8192, 43);
  CHECK(a != c);
}

TEST_CASE("generated size lands close under the target") {
  DtdGraph g = univ_graph();
  for (std::size_t target : {std::size_t{1024}, std::size_t{10240}, std::size_t{102400}}) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      std::string doc = generate_document(g, target, seed);
      CHECK(doc.size() <= target);
      CHECK(doc.size() >= target - target / 10);
    }
  }
}

TEST_CASE("generated documents parse and conform to the dtd") {
  DtdGraph g = univ_graph();
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    std::string text = generate_document(g, 4096, seed);
    DomTree tree = load_document(text);
    CHECK(tree.root->name == "univ");
    check_conforms(*tree.root, g);
  }
}

TEST_CASE("required children always appear") {
  DtdGraph g = build_graph(
      parse_dtd("<!ELEMENT a (b, c*)><!ELEMENT b (#PCDATA)><!ELEMENT c (#PCDATA)>"), "a");
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    DomTree tree = load_document(generate_document(g, 512, seed));
    check_conforms(*tree.root, g);
    std::size_t bs = 0;
    for (const auto& child : tree.root->children)
      if (child->name == "b") ++bs;
    CHECK(bs == 1);
  }
}

TEST_CASE("too small a target is rejected") {
  DtdGraph g = univ_graph();
  CHECK_THROWS_AS(generate_document(g, 10, 1), TargetTooSmall);
  try {
    generate_document(g, 10, 1);
    FAIL("expected TargetTooSmall");
  } catch (const TargetTooSmall& e) {
    CHECK(std::string(e.what()).find("10") != std::string::npos);
  }
}

TEST_CASE("tight budgets use one-character required attributes") {
  DtdGraph g = build_graph(
      parse_dtd("<!ELEMENT a (#PCDATA)><!ATTLIST a verylongname CDATA #REQUIRED>"), "a");
  // minimal rendering: <a verylongname="v"/>
  const std::size_t minimal = 21;
  CHECK_THROWS_AS(generate_document(g, minimal - 1, 1), TargetTooSmall);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    std::string doc = generate_document(g, minimal, seed);
    CHECK(doc.size() <= minimal);
    DomTree tree = load_document(doc);
    REQUIRE(tree.root->attrs.size() == 1);
    CHECK(tree.root->attrs[0].second.size() == 1);
  }
}

TEST_CASE("embedded values survive shredding") {
  DtdGraph g = univ_graph();
  for (Strategy strategy : {Strategy::DtdMap, Strategy::Shared}) {
    GenRecord record;
    std::string text = generate_document(g, 20000, 7, &record);
    DomTree tree = load_document(text);
    CHECK(record.elements == tree.element_count);

    RelationalSchema schema = map_schema(g, strategy);
    MemorySink sink(schema);
    xinsert(tree, g, schema, sink);

    PairMultiset cell_attrs, cell_leaves;
    collect_cells(sink, schema, cell_attrs, cell_leaves);
    CHECK(cell_attrs == record_attrs(record));
    CHECK(cell_leaves == record_leaves(record));
  }
}

TEST_CASE("generated counts satisfy the queue laws") {
  DtdGraph g = univ_graph();
  RelationalSchema schema = map_schema(g, Strategy::DtdMap);
  GenRecord record;
  std::string text = generate_document(g, 1 << 20, 7, &record);
  DomTree tree = load_document(text);
  CountingSink sink(schema);
  ShredStats stats = xinsert(tree, g, schema, sink);
  CHECK(stats.r_enqueues == tree.element_count - 1);
  CHECK(stats.q_enqueues == count_non_inlinable(*tree.root, g));
  CHECK(stats.tuples == stats.q_enqueues);
}

TEST_CASE("recursive dtds generate bounded documents") {
  DtdGraph g = build_graph(parse_dtd("<!ELEMENT a (b*)><!ELEMENT b (a?)>"), "a");
  RelationalSchema schema = map_schema(g, Strategy::DtdMap);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    std::string text = generate_document(g, 4096, seed);
    CHECK(text.size() <= 4096);
    DomTree tree = load_document(text);
    check_conforms(*tree.root, g);
    MemorySink sink(schema);
    ShredStats stats = xinsert(tree, g, schema, sink);
    CHECK(stats.r_enqueues == tree.element_count - 1);
    CHECK(stats.q_enqueues == tree.element_count);  // nothing is inlinable here
  }
}

TEST_CASE("empty content leaves never record values") {
  DtdGraph g = build_graph(parse_dtd("<!ELEMENT r (e*)><!ELEMENT e EMPTY>"), "r");
  GenRecord record;
  std::string text = generate_document(g, 2048, 5, &record);
  DomTree tree = load_document(text);
  CHECK(record.leaf_values.empty());
  for (const auto& child : tree.root->children) {
    CHECK(child->name == "e");
    CHECK_FALSE(child->value.has_value());
  }
}

TEST_CASE("values keep their shape through escaping") {
  // Specials land inside values; none should leak whitespace at the edges,
  // or the trimmed parse would disagree with the record.
  DtdGraph g = univ_graph();
  GenRecord record;
  generate_document(g, 50000, 11, &record);
  bool saw_special = false;
  for (const auto& [name, value] : record.leaf_values) {
    if (value.find_first_of(",\"'&<> ") != std::string::npos) saw_special = true;
    if (!value.empty()) {
      CHECK(value.front() != ' ');
      CHECK(value.back() != ' ');
    }
  }
  for (const auto& [name, value] : record.attr_values)
    if (value.find_first_of(",\"'&<>") != std::string::npos) saw_special = true;
  CHECK(saw_special);
}
