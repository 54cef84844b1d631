#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xshred/errors.hpp"
#include "xshred/schema.hpp"
#include "xshred/shred.hpp"

namespace xshred {

// CSV dialect: UTF-8, no BOM, LF endings, comma separator, one header row.
// Fields containing comma, quote, CR or LF are quoted with quotes doubled.
// NULL is a bare empty field; the empty string is "".
inline void append_csv_field(std::string& out, const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return;
  if (const auto* n = std::get_if<long long>(&v)) {
    out += std::to_string(*n);
    return;
  }
  const std::string& s = std::get<std::string>(v);
  if (s.empty()) {
    out += "\"\"";
    return;
  }
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

inline std::string csv_header(const TableDef& table) {
  std::string line;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) line += ',';
    line += table.columns[i].name;
  }
  line += '\n';
  return line;
}

inline std::string csv_row(const std::vector<Value>& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    append_csv_field(line, row[i]);
  }
  line += '\n';
  return line;
}

// SQL literals: NULL keyword, bare integers, single-quoted strings with
// embedded quotes doubled.
inline void append_sql_literal(std::string& out, const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) {
    out += "NULL";
    return;
  }
  if (const auto* n = std::get_if<long long>(&v)) {
    out += std::to_string(*n);
    return;
  }
  out += '\'';
  for (char c : std::get<std::string>(v)) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
}

inline std::string sql_insert(const TableDef& table, const std::vector<Value>& row) {
  std::string stmt = "INSERT INTO " + table.name + " (";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) stmt += ',';
    stmt += table.columns[i].name;
  }
  stmt += ") VALUES (";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) stmt += ',';
    append_sql_literal(stmt, row[i]);
  }
  stmt += ");\n";
  return stmt;
}

namespace detail {

inline std::vector<const TableDef*> all_tables(const RelationalSchema& schema) {
  std::vector<const TableDef*> tables;
  for (const auto& t : schema.tables) tables.push_back(&t);
  if (schema.edge_table) tables.push_back(&*schema.edge_table);
  return tables;
}

}  // namespace detail

// One <Table>.csv per table under out_dir. Files appear on first row unless
// emit_empty asks for every table's header file up front.
class CsvSink : public Sink {
 public:
  CsvSink(const RelationalSchema& schema, std::filesystem::path out_dir, bool emit_empty = false)
      : schema_(schema), out_dir_(std::move(out_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    if (ec) throw IoError("cannot create directory " + out_dir_.string());
    for (const auto* t : detail::all_tables(schema_)) rows_[t->name] = 0;
    if (emit_empty)
      for (const auto* t : detail::all_tables(schema_)) open_file(*t);
  }

  void write(const TableDef& table, const std::vector<Value>& row) override {
    auto counter = rows_.find(table.name);
    if (counter == rows_.end()) throw UnknownTable(table.name);
    auto it = files_.find(table.name);
    if (it == files_.end()) it = open_file(table);
    it->second << csv_row(row);
    if (!it->second) throw IoError("write failed for " + table.name + ".csv");
    ++counter->second;
  }

  SinkReport finalize() override {
    if (!report_) {
      for (auto& [name, stream] : files_) {
        stream.flush();
        if (!stream) throw IoError("flush failed for " + name + ".csv");
      }
      files_.clear();
      report_ = SinkReport{rows_, paths_};
    }
    return *report_;
  }

 private:
  std::map<std::string, std::ofstream>::iterator open_file(const TableDef& table) {
    std::filesystem::path path = out_dir_ / (table.name + ".csv");
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw IoError("cannot open " + path.string());
    stream << csv_header(table);
    paths_.push_back(path.string());
    return files_.emplace(table.name, std::move(stream)).first;
  }

  const RelationalSchema& schema_;
  std::filesystem::path out_dir_;
  std::map<std::string, std::ofstream> files_;
  std::map<std::string, std::size_t> rows_;
  std::vector<std::string> paths_;
  std::optional<SinkReport> report_;
};

// Single SQL script: CREATE TABLE statements up front, INSERTs in write
// order.
class SqlSink : public Sink {
 public:
  SqlSink(const RelationalSchema& schema, std::filesystem::path out_file)
      : path_(std::move(out_file)) {
    if (path_.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path_.parent_path(), ec);
      if (ec) throw IoError("cannot create directory " + path_.parent_path().string());
    }
    stream_.open(path_, std::ios::binary);
    if (!stream_) throw IoError("cannot open " + path_.string());
    stream_ << emit_ddl(schema);
    for (const auto* t : detail::all_tables(schema)) rows_[t->name] = 0;
  }

  void write(const TableDef& table, const std::vector<Value>& row) override {
    auto counter = rows_.find(table.name);
    if (counter == rows_.end()) throw UnknownTable(table.name);
    stream_ << sql_insert(table, row);
    if (!stream_) throw IoError("write failed for " + path_.string());
    ++counter->second;
  }

  SinkReport finalize() override {
    if (!report_) {
      stream_.flush();
      if (!stream_) throw IoError("flush failed for " + path_.string());
      stream_.close();
      report_ = SinkReport{rows_, {path_.string()}};
    }
    return *report_;
  }

 private:
  std::filesystem::path path_;
  std::ofstream stream_;
  std::map<std::string, std::size_t> rows_;
  std::optional<SinkReport> report_;
};

// Keeps every row in memory, for tests.
class MemorySink : public Sink {
 public:
  explicit MemorySink(const RelationalSchema& schema) {
    for (const auto* t : detail::all_tables(schema)) tables_[t->name] = {};
  }

  void write(const TableDef& table, const std::vector<Value>& row) override {
    auto it = tables_.find(table.name);
    if (it == tables_.end()) throw UnknownTable(table.name);
    it->second.push_back(row);
  }

  SinkReport finalize() override {
    SinkReport report;
    for (const auto& [name, rows] : tables_) report.rows[name] = rows.size();
    return report;
  }

  const std::map<std::string, std::vector<std::vector<Value>>>& tables() const { return tables_; }

 private:
  std::map<std::string, std::vector<std::vector<Value>>> tables_;
};

// Discards rows, for timing runs.
class CountingSink : public Sink {
 public:
  explicit CountingSink(const RelationalSchema& schema) {
    for (const auto* t : detail::all_tables(schema)) rows_[t->name] = 0;
  }

  void write(const TableDef& table, const std::vector<Value>&) override {
    auto it = rows_.find(table.name);
    if (it == rows_.end()) throw UnknownTable(table.name);
    ++it->second;
  }

  SinkReport finalize() override { return SinkReport{rows_, {}}; }

 private:
  std::map<std::string, std::size_t> rows_;
};

// format is "csv" (out_path is a directory) or "sql" (out_path is a
// directory receiving load.sql).
inline std::unique_ptr<Sink> open_sink(const RelationalSchema& schema, const std::string& format,
                                       const std::filesystem::path& out_path,
                                       bool emit_empty = false) {
  if (format == "csv") return std::make_unique<CsvSink>(schema, out_path, emit_empty);
  if (format == "sql") return std::make_unique<SqlSink>(schema, out_path / "load.sql");
  throw Error("unknown output format '" + format + "'");
}

}  // namespace xshred
