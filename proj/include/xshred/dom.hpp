#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xshred/dtd.hpp"
#include "xshred/errors.hpp"

namespace xshred {

// Element-only document tree: attributes ride on their element, text survives
// only as the value of childless elements. value stays empty (NULL) for
// self-closing elements and becomes "" for <a></a>.
struct ElementNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;  // document order
  std::vector<std::unique_ptr<ElementNode>> children;
  std::optional<std::string> value;
};

struct DomTree {
  std::unique_ptr<ElementNode> root;
  std::size_t element_count = 0;
  std::size_t attribute_count = 0;
};

// (elements, attributes) counted straight off the tree.
inline std::pair<std::size_t, std::size_t> node_count(const DomTree& tree) {
  std::size_t elements = 0, attributes = 0;
  std::vector<const ElementNode*> stack;
  if (tree.root) stack.push_back(tree.root.get());
  while (!stack.empty()) {
    const ElementNode* node = stack.back();
    stack.pop_back();
    ++elements;
    attributes += node->attrs.size();
    for (const auto& child : node->children) stack.push_back(child.get());
  }
  return {elements, attributes};
}

namespace detail {

inline std::string trim_ws(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' || s[e - 1] == '\r'))
    --e;
  return std::string(s.substr(b, e - b));
}

inline bool is_ws_only(std::string_view s) {
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
  return true;
}

inline void append_utf8(std::string& out, unsigned long cp) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class XmlParser {
 public:
  XmlParser(std::string_view text, WarningList* warnings) : text_(text), warnings_(warnings) {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  DomTree parse() {
    DomTree tree;
    skip_misc();
    if (eof()) throw EmptyDocument();
    if (peek() != '<') fail("content before the root element");
    tree.root = parse_element(tree);
    skip_misc();
    if (!eof()) fail("content after the root element");
    return tree;
  }

 private:
  std::string_view text_;
  WarningList* warnings_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  [[noreturn]] void fail(const std::string& detail) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw MalformedXml(line, col, detail);
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
  }

  void skip_until(std::string_view terminator, const std::string& what) {
    std::size_t end = text_.find(terminator, pos_);
    if (end == std::string_view::npos) fail("unterminated " + what);
    pos_ = end + terminator.size();
  }

  // Prolog, comments, PIs, DOCTYPE, whitespace between markup.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        skip_doctype();
      } else {
        return;
      }
    }
  }

  void skip_doctype() {
    pos_ += 9;
    int brackets = 0;
    while (!eof()) {
      char c = text_[pos_++];
      if (c == '[') ++brackets;
      else if (c == ']') --brackets;
      else if (c == '>' && brackets == 0) return;
      else if (c == '"' || c == '\'') {
        std::size_t end = text_.find(c, pos_);
        if (end == std::string_view::npos) break;
        pos_ = end + 1;
      }
    }
    fail("unterminated DOCTYPE");
  }

  std::string parse_name() {
    std::size_t start = pos_;
    if (eof() || !is_xml_name_start(peek())) fail("expected a name");
    ++pos_;
    while (!eof() && is_xml_name_char(peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      std::size_t end = raw.find(';', i + 1);
      if (end == std::string_view::npos) fail("unterminated entity reference");
      std::string_view ref = raw.substr(i + 1, end - i - 1);
      if (ref == "amp") out.push_back('&');
      else if (ref == "lt") out.push_back('<');
      else if (ref == "gt") out.push_back('>');
      else if (ref == "apos") out.push_back('\'');
      else if (ref == "quot") out.push_back('"');
      else if (!ref.empty() && ref[0] == '#') {
        unsigned long cp = 0;
        bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
        std::string_view digits = ref.substr(hex ? 2 : 1);
        if (digits.empty()) fail("empty character reference");
        for (char c : digits) {
          unsigned long digit;
          if (c >= '0' && c <= '9') digit = static_cast<unsigned long>(c - '0');
          else if (hex && c >= 'a' && c <= 'f') digit = static_cast<unsigned long>(c - 'a' + 10);
          else if (hex && c >= 'A' && c <= 'F') digit = static_cast<unsigned long>(c - 'A' + 10);
          else fail("bad character reference");
          cp = cp * (hex ? 16 : 10) + digit;
          if (cp > 0x10FFFF) fail("character reference out of range");
        }
        append_utf8(out, cp);
      } else {
        fail("unknown entity &" + std::string(ref) + ";");
      }
      i = end + 1;
    }
    return out;
  }

  std::string parse_attr_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected a quoted attribute value");
    char quote = text_[pos_++];
    std::size_t start = pos_;
    std::size_t end = text_.find(quote, start);
    if (end == std::string_view::npos) fail("unterminated attribute value");
    std::string_view raw = text_.substr(start, end - start);
    if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value");
    pos_ = end + 1;
    return decode(raw);
  }

  std::unique_ptr<ElementNode> parse_element(DomTree& tree) {
    ++pos_;  // consume '<'
    auto node = std::make_unique<ElementNode>();
    node->name = parse_name();
    ++tree.element_count;

    for (;;) {
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (peek() == '>' || starts_with("/>")) break;
      std::string attr = parse_name();
      skip_ws();
      if (eof() || peek() != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      std::string value = parse_attr_value();
      for (const auto& existing : node->attrs)
        if (existing.first == attr) fail("duplicate attribute '" + attr + "'");
      node->attrs.emplace_back(std::move(attr), std::move(value));
      ++tree.attribute_count;
    }

    if (starts_with("/>")) {
      pos_ += 2;
      return node;  // value stays NULL
    }
    ++pos_;  // consume '>'

    std::string text;
    for (;;) {
      if (eof()) fail("unterminated element '" + node->name + "'");
      if (peek() == '<') {
        if (starts_with("</")) {
          pos_ += 2;
          std::string closing = parse_name();
          if (closing != node->name)
            fail("mismatched close tag '" + closing + "' for '" + node->name + "'");
          skip_ws();
          if (eof() || peek() != '>') fail("malformed close tag");
          ++pos_;
          break;
        }
        if (starts_with("<!--")) {
          pos_ += 4;
          skip_until("-->", "comment");
        } else if (starts_with("<![CDATA[")) {
          pos_ += 9;
          std::size_t end = text_.find("]]>", pos_);
          if (end == std::string_view::npos) fail("unterminated CDATA section");
          text.append(text_.substr(pos_, end - pos_));
          pos_ = end + 3;
        } else if (starts_with("<?")) {
          skip_until("?>", "processing instruction");
        } else {
          node->children.push_back(parse_element(tree));
        }
      } else {
        std::size_t start = pos_;
        std::size_t end = text_.find('<', start);
        if (end == std::string_view::npos) end = text_.size();
        text.append(decode(text_.substr(start, end - start)));
        pos_ = end;
      }
    }

    if (node->children.empty()) {
      node->value = trim_ws(text);  // open/close pair: "" rather than NULL
    } else if (!is_ws_only(text)) {
      warn(warnings_, "dropping text content of non-leaf element '" + node->name + "'");
    }
    return node;
  }
};

}  // namespace detail

inline DomTree load_document(std::string_view text, WarningList* warnings = nullptr) {
  detail::XmlParser parser(text, warnings);
  return parser.parse();
}

inline DomTree load_document_file(const std::string& path, WarningList* warnings = nullptr) {
  return load_document(read_text_file(path), warnings);
}

}  // namespace xshred
