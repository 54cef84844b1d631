#include <catch2/catch_amalgamated.hpp>

#include "xshred/schema.hpp"

using namespace xshred;

namespace {

DtdGraph univ_graph() {
  return build_graph(parse_dtd_file(std::string(SAMPLES_DIR) + "/univ.dtd"), "univ");
}

std::vector<std::string> column_names(const TableDef& t) {
  std::vector<std::string> out;
  for (const auto& c : t.columns) out.push_back(c.name);
  return out;
}

std::vector<std::string> table_names(const RelationalSchema& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tables) out.push_back(t.name);
  return out;
}

}  // namespace

TEST_CASE("inlinability") {
  DtdGraph g = univ_graph();
  CHECK(is_inlinable("tel", g));
  CHECK(is_inlinable("fax", g));
  CHECK(is_inlinable("website", g));
  CHECK_FALSE(is_inlinable("univ", g));     // root
  CHECK_FALSE(is_inlinable("college", g));  // '*' child
  CHECK_FALSE(is_inlinable("dep", g));      // two parent types

  DtdGraph rec = build_graph(parse_dtd("<!ELEMENT a (b?)><!ELEMENT b (a?)>"), "a");
  CHECK_FALSE(is_inlinable("b", rec));  // on a cycle
}

TEST_CASE("sample schema under dtdmap") {
  RelationalSchema s = map_schema(univ_graph(), Strategy::DtdMap);
  CHECK(s.strategy == Strategy::DtdMap);
  CHECK(table_names(s) == std::vector<std::string>{"Univ", "College", "School", "Dep"});
  REQUIRE(s.edge_table.has_value());

  CHECK(column_names(s.tables[0]) == std::vector<std::string>{"ID", "nodeType", "uName"});
  CHECK(column_names(s.tables[1]) == std::vector<std::string>{"ID", "cName"});
  CHECK(column_names(s.tables[2]) == std::vector<std::string>{"ID", "sName"});
  CHECK(column_names(s.tables[3]) ==
        std::vector<std::string>{"ID", "nodeType", "dName", "tel", "fax", "website"});
  CHECK(column_names(*s.edge_table) ==
        std::vector<std::string>{"parentID", "childID", "parentType", "childType"});

  CHECK(s.tables[3].hosts == std::vector<std::string>{"dep", "tel", "fax", "website"});
  CHECK(s.fk_columns.empty());  // every non-inlinable child link is '*'

  const auto& m = s.mappings;
  CHECK(m.sigma.at("univ") == "Univ");
  CHECK(m.sigma.at("tel") == "Dep");
  CHECK(m.sigma.at("website") == "Dep");
  CHECK(m.theta.at({"univ", "uName"}) == "uName");
  CHECK(m.theta.at({"dep", "dName"}) == "dName");
  CHECK(m.delta.at("tel") == "tel");
  CHECK(m.delta.at("fax") == "fax");
  CHECK(m.delta.at("website") == "website");
  CHECK(m.delta.count("dep") == 0);  // non-leaf has no value column

  CHECK(s.table_for_element("tel").name == "Dep");
  CHECK_THROWS_AS(s.table_for_element("nope"), UnknownElement);
  CHECK(s.find_table("Edge") == &*s.edge_table);
  CHECK(s.find_table("Missing") == nullptr);
}

TEST_CASE("sample ddl under dtdmap") {
  RelationalSchema s = map_schema(univ_graph(), Strategy::DtdMap);
  const std::string expected =
      "CREATE TABLE Univ (ID INTEGER, nodeType VARCHAR(255), uName VARCHAR(255));\n"
      "CREATE TABLE College (ID INTEGER, cName VARCHAR(255));\n"
      "CREATE TABLE School (ID INTEGER, sName VARCHAR(255));\n"
      "CREATE TABLE Dep (ID INTEGER, nodeType VARCHAR(255), dName VARCHAR(255), "
      "tel VARCHAR(255), fax VARCHAR(255), website VARCHAR(255));\n"
      "CREATE TABLE Edge (parentID INTEGER, childID INTEGER, parentType VARCHAR(255), "
      "childType VARCHAR(255));\n";
  CHECK(emit_ddl(s) == expected);
}

TEST_CASE("sample schema under shared") {
  RelationalSchema s = map_schema(univ_graph(), Strategy::Shared);
  CHECK_FALSE(s.edge_table.has_value());
  CHECK(table_names(s) == std::vector<std::string>{"Univ", "College", "School", "Dep"});
  CHECK(column_names(s.tables[0]) == std::vector<std::string>{"ID", "nodeType", "uName"});
  CHECK(column_names(s.tables[1]) ==
        std::vector<std::string>{"ID", "parentID", "parentType", "cName"});
  CHECK(column_names(s.tables[2]) ==
        std::vector<std::string>{"ID", "parentID", "parentType", "sName"});
  CHECK(column_names(s.tables[3]) ==
        std::vector<std::string>{"ID", "nodeType", "parentID", "parentType",
                                 "dName", "tel", "fax", "website"});
  std::string ddl = emit_ddl(s);
  CHECK(ddl.find("Edge") == std::string::npos);
  CHECK(ddl.find("parentID INTEGER, parentType VARCHAR(255)") != std::string::npos);
}

TEST_CASE("single leaf root schema") {
  DtdGraph g = build_graph(parse_dtd("<!ELEMENT a (#PCDATA)>"), "a");
  RelationalSchema s = map_schema(g, Strategy::DtdMap);
  REQUIRE(s.tables.size() == 1);
  CHECK(s.tables[0].name == "A");
  CHECK(column_names(s.tables[0]) == std::vector<std::string>{"ID", "nodeType", "a_value"});
  CHECK(s.mappings.delta.at("a") == "a_value");
  std::string ddl = emit_ddl(s);
  CHECK(std::count(ddl.begin(), ddl.end(), '\n') == 2);  // A + Edge
}

TEST_CASE("column name resolution") {
  const auto& reserved = default_reserved_words();
  CHECK(resolve_name("uName", {}, reserved, "univ") == "uName");
  CHECK(resolve_name("date", {}, reserved, "meeting") == "meeting_date");
  CHECK(resolve_name("tel", {"tel"}, reserved, "dep") == "dep_tel");
  CHECK(resolve_name("tel", {"tel", "dep_tel"}, reserved, "dep") == "dep_tel_2");
  CHECK(resolve_name("tel", {"tel", "dep_tel", "dep_tel_2"}, reserved, "dep") == "dep_tel_3");
  CHECK(resolve_name("TEL", {"tel"}, reserved, "dep") == "dep_TEL");  // case folds
  CHECK(resolve_name("Integer", {}, reserved, "x") == "x_Integer");
}

TEST_CASE("reserved attribute names get host prefixes in tables") {
  DtdGraph g = build_graph(
      parse_dtd("<!ELEMENT m (#PCDATA)><!ATTLIST m date CDATA #REQUIRED id CDATA #IMPLIED>"),
      "m");
  RelationalSchema s = map_schema(g, Strategy::DtdMap);
  auto names = column_names(s.tables[0]);
  CHECK(names == std::vector<std::string>{"ID", "nodeType", "m_date", "m_id", "m_value"});
  CHECK(s.mappings.theta.at({"m", "date"}) == "m_date");
  CHECK(s.mappings.theta.at({"m", "id"}) == "m_id");  // collides with ID, case folded
}

TEST_CASE("fk columns for non-star children") {
  DtdGraph g = build_graph(
      parse_dtd("<!ELEMENT p (f?)><!ELEMENT s (f?)><!ELEMENT f (#PCDATA)>"), "p");
  RelationalSchema s = map_schema(g, Strategy::DtdMap);
  CHECK(table_names(s) == std::vector<std::string>{"P", "S", "F"});
  CHECK(column_names(s.tables[0]) == std::vector<std::string>{"ID", "nodeType", "f_EID"});
  CHECK(column_names(s.tables[1]) == std::vector<std::string>{"ID", "f_EID"});
  CHECK(column_names(s.tables[2]) == std::vector<std::string>{"ID", "nodeType", "f_value"});
  CHECK(s.fk_columns.at({"p", "f"}) == "f_EID");
  CHECK(s.fk_columns.at({"s", "f"}) == "f_EID");
  REQUIRE(s.tables[0].columns[2].role == ColumnRole::FkEid);
  CHECK(s.tables[0].columns[2].source_element == "f");
}

TEST_CASE("fk through an inlined member") {
  DtdGraph g = build_graph(parse_dtd("<!ELEMENT r (a*, b?)><!ELEMENT b (a?)><!ELEMENT a (#PCDATA)>"),
                           "r");
  RelationalSchema s = map_schema(g, Strategy::DtdMap);
  CHECK(table_names(s) == std::vector<std::string>{"R", "A"});
  CHECK(s.tables[0].hosts == std::vector<std::string>{"r", "b"});
  // a under r is '*'; a under inlined b is '?' and lands as an FK in R.
  CHECK(column_names(s.tables[0]) == std::vector<std::string>{"ID", "nodeType", "a_EID"});
  CHECK(s.fk_columns.at({"b", "a"}) == "a_EID");
  CHECK(column_names(s.tables[1]) == std::vector<std::string>{"ID", "nodeType", "a_value"});
}

TEST_CASE("element named edge cannot shadow the edge table") {
  DtdGraph g = build_graph(parse_dtd("<!ELEMENT r (edge*)><!ELEMENT edge (#PCDATA)>"), "r");
  RelationalSchema s = map_schema(g, Strategy::DtdMap);
  REQUIRE(s.tables.size() == 2);
  CHECK(s.tables[1].name == "edge_Edge");
  CHECK(s.mappings.sigma.at("edge") == "edge_Edge");

  RelationalSchema shared = map_schema(g, Strategy::Shared);
  CHECK(shared.tables[1].name == "Edge");  // no edge table reserves the name here
}

TEST_CASE("theta and delta stay within sigma tables") {
  RelationalSchema s = map_schema(univ_graph(), Strategy::DtdMap);
  for (const auto& [key, column] : s.mappings.theta) {
    const TableDef& t = s.table_for_element(key.first);
    CHECK(t.column_index(column).has_value());
  }
  for (const auto& [leaf, column] : s.mappings.delta) {
    const TableDef& t = s.table_for_element(leaf);
    auto idx = t.column_index(column);
    REQUIRE(idx.has_value());
    CHECK(t.columns[*idx].role == ColumnRole::LeafValue);
    CHECK(t.columns[*idx].source_element == leaf);
  }
}

TEST_CASE("table lookup helpers") {
  TableDef t;
  t.name = "T";
  t.columns = {Column{"ID", ColumnRole::Id, "", ""},
               Column{"x", ColumnRole::XmlAttr, "t", "x"}};
  CHECK(t.column_index("x") == 1);
  CHECK_FALSE(t.column_index("y").has_value());
  CHECK(t.role_index(ColumnRole::Id) == 0);
  CHECK_FALSE(t.role_index(ColumnRole::LeafValue).has_value());
}
