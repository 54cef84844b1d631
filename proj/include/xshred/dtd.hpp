#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xshred/errors.hpp"

namespace xshred {

// Occurrence marker attached to a content particle. '+' exists only inside
// parsed content models; cardinality flattening in build_graph folds it into
// '*' so that downstream label tests stay total.
enum class Occurrence : char {
  One = '1',
  Optional = '?',
  ZeroOrMore = '*',
  OneOrMore = '+',
};

struct ContentParticle {
  enum class Kind { Element, Sequence, Choice };

  Kind kind = Kind::Element;
  std::string name;                       // Kind::Element only
  std::vector<ContentParticle> children;  // group kinds only
  Occurrence occurrence = Occurrence::One;
};

enum class ContentKind {
  PcdataLeaf,  // (#PCDATA)
  Empty,       // EMPTY
  Children,    // element content
  Mixed,       // (#PCDATA | a | b)* -- treated as non-leaf, text dropped at shred time
};

struct ElementDecl {
  std::string name;
  ContentKind content = ContentKind::PcdataLeaf;
  // Children: the top-level group. Mixed: a Choice of the named alternatives
  // with occurrence ZeroOrMore. Unused otherwise.
  ContentParticle model;
};

enum class AttDefaultKind { Required, Implied, Defaulted };

struct AttDef {
  std::string name;
  std::string type = "CDATA";  // recorded verbatim; all attribute values are strings
  AttDefaultKind default_kind = AttDefaultKind::Implied;
  std::optional<std::string> default_value;  // Defaulted only (covers #FIXED)
};

struct AttListDecl {
  std::string element;
  std::vector<AttDef> attributes;
};

struct DtdDecls {
  std::vector<ElementDecl> elements;
  std::vector<AttListDecl> attlists;
};

inline bool is_xml_name_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == ':' || c >= 0x80;
}

inline bool is_xml_name_char(unsigned char c) {
  return is_xml_name_start(c) || std::isdigit(c) || c == '-' || c == '.';
}

inline bool is_valid_xml_name(std::string_view s) {
  if (s.empty() || !is_xml_name_start(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return is_xml_name_char(static_cast<unsigned char>(c)); });
}

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Recursive-descent parser over internal-subset-style DTD text.
class DtdParser {
public:
  DtdParser(std::string_view text, WarningList* warnings) : text_(text), warnings_(warnings) {}

  DtdDecls parse() {
    DtdDecls out;
    std::set<std::string> seen_elements;
    for (;;) {
      skip_space();
      if (at_end()) break;
      if (eat("<!--")) {
        skip_until("-->");
      } else if (eat("<?")) {
        skip_until("?>");
      } else if (peek_is("<![")) {
        fail_unsupported("conditional sections");
      } else if (peek_is("<!ENTITY")) {
        fail_unsupported("entity declarations");
      } else if (peek_is("<!NOTATION")) {
        fail_unsupported("NOTATION declarations");
      } else if (peek_is("<!DOCTYPE")) {
        fail_unsupported("nested DOCTYPE (pass the bare internal subset)");
      } else if (eat("<!ELEMENT")) {
        ElementDecl decl = parse_element_decl();
        if (!seen_elements.insert(decl.name).second) throw DuplicateElementDecl(decl.name);
        out.elements.push_back(std::move(decl));
      } else if (eat("<!ATTLIST")) {
        out.attlists.push_back(parse_attlist_decl());
      } else if (peek_is("<!")) {
        skip_unknown_decl();
      } else if (peek() == '%') {
        fail_unsupported("parameter entity references");
      } else {
        fail("expected a declaration");
      }
    }
    return out;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  WarningList* warnings_;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  bool peek_is(std::string_view s) const { return text_.compare(pos_, s.size(), s) == 0; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool eat(std::string_view s) {
    if (!peek_is(s)) return false;
    for (std::size_t i = 0; i < s.size(); ++i) advance();
    return true;
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) advance();
  }

  bool skip_space1() {
    if (at_end() || !is_space(peek())) return false;
    skip_space();
    return true;
  }

  void skip_until(std::string_view terminator) {
    while (!at_end()) {
      if (eat(terminator)) return;
      advance();
    }
    fail("unterminated construct, expected '" + std::string(terminator) + "'");
  }

  [[noreturn]] void fail(const std::string& detail) const { throw SyntaxError(line_, col_, detail); }

  [[noreturn]] void fail_unsupported(const std::string& what) const { throw UnsupportedFeature(what); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  std::string parse_name() {
    if (at_end() || !is_xml_name_start(static_cast<unsigned char>(peek()))) fail("expected a name");
    std::size_t start = pos_;
    while (!at_end() && is_xml_name_char(static_cast<unsigned char>(peek()))) advance();
    return std::string(text_.substr(start, pos_ - start));
  }

  Occurrence parse_occurrence() {
    switch (peek()) {
      case '?': advance(); return Occurrence::Optional;
      case '*': advance(); return Occurrence::ZeroOrMore;
      case '+': advance(); return Occurrence::OneOrMore;
      default: return Occurrence::One;
    }
  }

  // <!ELEMENT already consumed.
  ElementDecl parse_element_decl() {
    if (!skip_space1()) fail("expected whitespace after <!ELEMENT");
    ElementDecl decl;
    decl.name = parse_name();
    skip_space();
    if (eat("EMPTY")) {
      decl.content = ContentKind::Empty;
    } else if (peek_is("ANY")) {
      fail_unsupported("ANY content models");
    } else if (peek() == '(') {
      advance();
      skip_space();
      if (eat("#PCDATA")) {
        parse_pcdata_rest(decl);
      } else {
        decl.content = ContentKind::Children;
        decl.model = parse_group_rest();
      }
    } else {
      fail("expected EMPTY or a parenthesized content model");
    }
    skip_space();
    expect('>');
    return decl;
  }

  // '(' '#PCDATA' already consumed; handles both (#PCDATA) and mixed forms.
  void parse_pcdata_rest(ElementDecl& decl) {
    std::vector<ContentParticle> alternatives;
    for (;;) {
      skip_space();
      if (eat(")")) break;
      expect('|');
      skip_space();
      ContentParticle p;
      p.kind = ContentParticle::Kind::Element;
      p.name = parse_name();
      alternatives.push_back(std::move(p));
    }
    bool starred = peek() == '*';
    if (starred) advance();
    if (alternatives.empty()) {
      decl.content = ContentKind::PcdataLeaf;
      return;
    }
    if (!starred) fail("mixed content with element alternatives requires ')*'");
    decl.content = ContentKind::Mixed;
    decl.model.kind = ContentParticle::Kind::Choice;
    decl.model.children = std::move(alternatives);
    decl.model.occurrence = Occurrence::ZeroOrMore;
  }

  // Opening '(' already consumed.
  ContentParticle parse_group_rest() {
    ContentParticle group;
    group.kind = ContentParticle::Kind::Sequence;
    group.children.push_back(parse_cp());
    char separator = '\0';
    for (;;) {
      skip_space();
      char c = peek();
      if (c == ')') {
        advance();
        break;
      }
      if (c != ',' && c != '|') fail("expected ',', '|' or ')' in content model");
      if (separator != '\0' && c != separator) fail("cannot mix ',' and '|' at one group level");
      separator = c;
      advance();
      skip_space();
      group.children.push_back(parse_cp());
    }
    group.kind = separator == '|' ? ContentParticle::Kind::Choice : ContentParticle::Kind::Sequence;
    group.occurrence = parse_occurrence();
    return group;
  }

  ContentParticle parse_cp() {
    if (peek() == '(') {
      advance();
      skip_space();
      if (peek_is("#PCDATA")) fail("#PCDATA is only allowed at the top of a content model");
      return parse_group_rest();
    }
    ContentParticle p;
    p.kind = ContentParticle::Kind::Element;
    p.name = parse_name();
    p.occurrence = parse_occurrence();
    return p;
  }

  // <!ATTLIST already consumed.
  AttListDecl parse_attlist_decl() {
    if (!skip_space1()) fail("expected whitespace after <!ATTLIST");
    AttListDecl decl;
    decl.element = parse_name();
    std::set<std::string> names;
    for (;;) {
      bool spaced = skip_space1();
      if (peek() == '>') {
        advance();
        break;
      }
      if (at_end()) fail("unterminated <!ATTLIST>");
      if (!spaced) fail("expected whitespace between attribute definitions");
      AttDef att;
      att.name = parse_name();
      if (!skip_space1()) fail("expected whitespace after attribute name");
      att.type = parse_att_type();
      if (!skip_space1()) fail("expected whitespace after attribute type");
      parse_default_decl(att);
      if (!names.insert(att.name).second) {
        warn(warnings_, "duplicate attribute '" + att.name + "' on element '" + decl.element +
                            "'; first declaration wins");
        continue;
      }
      decl.attributes.push_back(std::move(att));
    }
    return decl;
  }

  std::string parse_att_type() {
    if (peek() == '(') return parse_enumeration();
    std::string kw = parse_name();
    if (kw == "NOTATION") {
      skip_space();
      if (peek() != '(') fail("NOTATION attribute type requires an enumeration");
      return kw + " " + parse_enumeration();
    }
    static const char* known[] = {"CDATA",  "ID",      "IDREF",   "IDREFS",
                                  "ENTITY", "ENTITIES", "NMTOKEN", "NMTOKENS"};
    if (std::find(std::begin(known), std::end(known), kw) == std::end(known))
      fail("unknown attribute type '" + kw + "'");
    return kw;
  }

  std::string parse_enumeration() {
    std::string raw = "(";
    expect('(');
    int depth = 1;
    while (depth > 0) {
      if (at_end()) fail("unterminated enumeration");
      char c = peek();
      if (c == '(') ++depth;
      if (c == ')') --depth;
      raw += c;
      advance();
    }
    return raw;
  }

  void parse_default_decl(AttDef& att) {
    if (eat("#REQUIRED")) {
      att.default_kind = AttDefaultKind::Required;
    } else if (eat("#IMPLIED")) {
      att.default_kind = AttDefaultKind::Implied;
    } else if (eat("#FIXED")) {
      if (!skip_space1()) fail("expected whitespace after #FIXED");
      att.default_kind = AttDefaultKind::Defaulted;
      att.default_value = parse_quoted_value();
    } else if (peek() == '"' || peek() == '\'') {
      att.default_kind = AttDefaultKind::Defaulted;
      att.default_value = parse_quoted_value();
    } else {
      fail("expected #REQUIRED, #IMPLIED, #FIXED or a quoted default value");
    }
  }

  std::string parse_quoted_value() {
    char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected a quoted value");
    advance();
    std::string value;
    while (peek() != quote) {
      if (at_end()) fail("unterminated quoted value");
      char c = peek();
      if (c == '&') {
        value += parse_builtin_entity();
        continue;
      }
      value += c;
      advance();
    }
    advance();
    return value;
  }

  char parse_builtin_entity() {
    // Only the five XML built-ins; anything else is an entity and out of scope.
    struct Builtin { std::string_view ref; char ch; };
    static constexpr Builtin builtins[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&apos;", '\''}, {"&quot;", '"'}};
    for (const auto& b : builtins)
      if (eat(b.ref)) return b.ch;
    fail_unsupported("entity references other than the five built-ins");
  }

  void skip_unknown_decl() {
    std::size_t at_line = line_, at_col = col_;
    eat("<!");
    std::string kind;
    while (!at_end() && is_xml_name_char(static_cast<unsigned char>(peek()))) {
      kind += peek();
      advance();
    }
    char quote = '\0';
    while (!at_end()) {
      char c = peek();
      if (quote != '\0') {
        if (c == quote) quote = '\0';
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        advance();
        warn(warnings_, "skipped unknown declaration <!" + kind + "> at " + std::to_string(at_line) +
                            ":" + std::to_string(at_col));
        return;
      }
      advance();
    }
    fail("unterminated declaration");
  }
};

}  // namespace detail

// Parses internal-subset-style DTD text (ELEMENT/ATTLIST declarations) into
// declaration lists. Unknown declaration kinds are skipped with a warning;
// entities, conditional sections and NOTATION raise UnsupportedFeature.
inline DtdDecls parse_dtd(std::string_view text, WarningList* warnings = nullptr) {
  return detail::DtdParser(text, warnings).parse();
}

inline DtdDecls parse_dtd_file(const std::filesystem::path& path, WarningList* warnings = nullptr) {
  return parse_dtd(read_text_file(path), warnings);
}

}  // namespace xshred
