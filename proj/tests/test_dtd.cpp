#include <catch2/catch_amalgamated.hpp>

#include "xshred/dtd.hpp"

using namespace xshred;

TEST_CASE("single leaf declaration") {
  DtdDecls decls = parse_dtd("<!ELEMENT tel (#PCDATA)>");
  REQUIRE(decls.elements.size() == 1);
  CHECK(decls.elements[0].name == "tel");
  CHECK(decls.elements[0].content == ContentKind::PcdataLeaf);
  CHECK(decls.attlists.empty());
}

TEST_CASE("empty input parses to nothing") {
  DtdDecls decls = parse_dtd("");
  CHECK(decls.elements.empty());
  CHECK(decls.attlists.empty());
}

TEST_CASE("sample DTD declaration counts") {
  DtdDecls decls = parse_dtd_file(std::string(SAMPLES_DIR) + "/univ.dtd");
  CHECK(decls.elements.size() == 7);
  CHECK(decls.attlists.size() == 4);
  CHECK(decls.elements.front().name == "univ");
  REQUIRE(decls.attlists.front().attributes.size() == 1);
  CHECK(decls.attlists.front().attributes[0].name == "uName");
  CHECK(decls.attlists.front().attributes[0].default_kind == AttDefaultKind::Required);
}

TEST_CASE("occurrence markers") {
  DtdDecls decls = parse_dtd("<!ELEMENT a (b?, c*, d+, e)>");
  const ContentParticle& model = decls.elements[0].model;
  REQUIRE(decls.elements[0].content == ContentKind::Children);
  REQUIRE(model.kind == ContentParticle::Kind::Sequence);
  REQUIRE(model.children.size() == 4);
  CHECK(model.children[0].occurrence == Occurrence::Optional);
  CHECK(model.children[1].occurrence == Occurrence::ZeroOrMore);
  CHECK(model.children[2].occurrence == Occurrence::OneOrMore);
  CHECK(model.children[3].occurrence == Occurrence::One);
}

TEST_CASE("nested groups and choice") {
  DtdDecls decls = parse_dtd("<!ELEMENT a ((b | c)+, d)*>");
  const ContentParticle& model = decls.elements[0].model;
  CHECK(model.occurrence == Occurrence::ZeroOrMore);
  REQUIRE(model.children.size() == 2);
  CHECK(model.children[0].kind == ContentParticle::Kind::Choice);
  CHECK(model.children[0].occurrence == Occurrence::OneOrMore);
  CHECK(model.children[1].name == "d");
}

TEST_CASE("mixed content") {
  DtdDecls decls = parse_dtd("<!ELEMENT note (#PCDATA | b | i)*>");
  CHECK(decls.elements[0].content == ContentKind::Mixed);
  REQUIRE(decls.elements[0].model.children.size() == 2);
  CHECK(decls.elements[0].model.children[0].name == "b");
  CHECK(decls.elements[0].model.children[1].name == "i");
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT note (#PCDATA | b)>"), SyntaxError);
}

TEST_CASE("EMPTY and ANY") {
  DtdDecls decls = parse_dtd("<!ELEMENT hr EMPTY>");
  CHECK(decls.elements[0].content == ContentKind::Empty);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT x ANY>"), UnsupportedFeature);
}

TEST_CASE("duplicate element declaration") {
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a (#PCDATA)><!ELEMENT a (#PCDATA)>"),
                  DuplicateElementDecl);
}

TEST_CASE("unsupported constructs error out") {
  CHECK_THROWS_AS(parse_dtd("<!ENTITY x 'y'>"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_dtd("<![INCLUDE[ ]]>"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_dtd("<!NOTATION n SYSTEM 'x'>"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_dtd("%ent;"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_dtd("<!DOCTYPE univ [ ]>"), UnsupportedFeature);
}

TEST_CASE("unknown declarations are skipped with a warning") {
  WarningList warnings;
  DtdDecls decls = parse_dtd("<!FOO something> <!ELEMENT a (#PCDATA)>", &warnings);
  CHECK(decls.elements.size() == 1);
  CHECK(warnings.size() == 1);
}

TEST_CASE("attribute list kinds") {
  DtdDecls decls = parse_dtd(
      "<!ELEMENT a EMPTY>"
      "<!ATTLIST a id ID #REQUIRED"
      " kind (x | y) \"x\""
      " note CDATA #IMPLIED"
      " fixed CDATA #FIXED \"f\">");
  REQUIRE(decls.attlists.size() == 1);
  const auto& atts = decls.attlists[0].attributes;
  REQUIRE(atts.size() == 4);
  CHECK(atts[0].default_kind == AttDefaultKind::Required);
  CHECK(atts[1].default_kind == AttDefaultKind::Defaulted);
  CHECK(atts[1].default_value == "x");
  CHECK(atts[2].default_kind == AttDefaultKind::Implied);
  CHECK(atts[3].default_kind == AttDefaultKind::Defaulted);
  CHECK(atts[3].default_value == "f");
}

TEST_CASE("duplicate attribute in one list keeps the first") {
  WarningList warnings;
  DtdDecls decls =
      parse_dtd("<!ATTLIST a x CDATA #IMPLIED x CDATA #REQUIRED>", &warnings);
  REQUIRE(decls.attlists[0].attributes.size() == 1);
  CHECK(decls.attlists[0].attributes[0].default_kind == AttDefaultKind::Implied);
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("comments and processing instructions are skipped") {
  DtdDecls decls = parse_dtd("<!-- c --> <?pi data?> <!ELEMENT a (#PCDATA)>");
  CHECK(decls.elements.size() == 1);
}

TEST_CASE("syntax errors carry position") {
  try {
    parse_dtd("\n<!ELEMENT a (b,>");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 1);
  }
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a"), SyntaxError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a (b, c | d)>"), SyntaxError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a (b (c))>"), SyntaxError);
  CHECK_THROWS_AS(parse_dtd("stray"), SyntaxError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a ((#PCDATA))>"), SyntaxError);
}

TEST_CASE("entity references in default values") {
  DtdDecls decls = parse_dtd("<!ATTLIST a x CDATA \"a&amp;b&lt;c\">");
  CHECK(decls.attlists[0].attributes[0].default_value == "a&b<c");
}
