#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xshred {

// Non-fatal diagnostics. Operations that can emit warnings take an optional
// WarningList; passing nullptr discards them.
using WarningList = std::vector<std::string>;

inline void warn(WarningList* sink, std::string msg) {
  if (sink) sink->push_back(std::move(msg));
}

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SyntaxError : public Error {
public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& detail)
      : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + detail),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class DuplicateElementDecl : public Error {
public:
  explicit DuplicateElementDecl(const std::string& name)
      : Error("duplicate <!ELEMENT> declaration for '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class UndeclaredElement : public Error {
public:
  explicit UndeclaredElement(const std::string& name)
      : Error("element '" + name + "' is referenced but never declared"), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class MissingRoot : public Error {
public:
  explicit MissingRoot(const std::string& name)
      : Error("root element '" + name + "' is not declared") {}
};

class NoSuchEdge : public Error {
public:
  NoSuchEdge(const std::string& parent, const std::string& child)
      : Error("no DTD edge from '" + parent + "' to '" + child + "'"), parent_(parent), child_(child) {}
  const std::string& parent() const { return parent_; }
  const std::string& child() const { return child_; }

private:
  std::string parent_;
  std::string child_;
};

class UnsupportedFeature : public Error {
public:
  explicit UnsupportedFeature(const std::string& what) : Error("unsupported DTD feature: " + what) {}
};

class MalformedXml : public Error {
public:
  MalformedXml(std::size_t line, std::size_t column, const std::string& detail)
      : Error("malformed XML at " + std::to_string(line) + ":" + std::to_string(column) + ": " + detail),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class EmptyDocument : public Error {
public:
  EmptyDocument() : Error("document contains no root element") {}
};

class UnknownElement : public Error {
public:
  explicit UnknownElement(const std::string& name)
      : Error("document element '" + name + "' does not exist in the DTD graph"), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

// Internal consistency failure: the schema and the engine disagree about a
// column. Indicates a bug, not bad input.
class MissingColumn : public Error {
public:
  MissingColumn(const std::string& table, const std::string& column)
      : Error("internal error: table '" + table + "' has no column for '" + column + "'") {}
};

class DuplicateFkChild : public Error {
public:
  DuplicateFkChild(const std::string& parent, const std::string& child)
      : Error("two '" + child + "' children under one '" + parent +
              "' instance, but the DTD allows at most one (FK column is single-valued)") {}
};

class UnknownTable : public Error {
public:
  explicit UnknownTable(const std::string& name)
      : Error("tuple targets table '" + name + "' which is not declared in the sink's schema") {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

class TargetTooSmall : public Error {
public:
  TargetTooSmall(std::size_t minimal, std::size_t target)
      : Error("minimal document (" + std::to_string(minimal) + " bytes) exceeds target size " +
              std::to_string(target)) {}
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading file: " + path.string());
  return std::move(buf).str();
}

}  // namespace xshred
