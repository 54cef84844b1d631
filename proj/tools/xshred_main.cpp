#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xshred/xshred.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvariant = 2;

xshred::Strategy parse_strategy(const std::string& name) {
  if (name == "dtdmap") return xshred::Strategy::DtdMap;
  if (name == "shared") return xshred::Strategy::Shared;
  throw xshred::Error("unknown strategy '" + name + "' (expected dtdmap or shared)");
}

// "1m,2m,512k,1g" -> bytes. Bare numbers are bytes.
std::vector<std::size_t> parse_sizes(const std::string& spec) {
  std::vector<std::size_t> sizes;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    std::string item = spec.substr(pos, comma - pos);
    if (item.empty()) throw xshred::Error("empty size in --sizes");
    std::size_t multiplier = 1;
    char last = item.back();
    if (last == 'k' || last == 'K') multiplier = 1024;
    if (last == 'm' || last == 'M') multiplier = 1024 * 1024;
    if (last == 'g' || last == 'G') multiplier = 1024ull * 1024 * 1024;
    if (multiplier != 1) item.pop_back();
    std::size_t parsed = 0;
    try {
      parsed = std::stoull(item);
    } catch (const std::exception&) {
      throw xshred::Error("bad size '" + item + "' in --sizes");
    }
    sizes.push_back(parsed * multiplier);
    pos = comma + 1;
    if (comma == spec.size()) break;
  }
  return sizes;
}

void print_warnings(const xshred::WarningList& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

xshred::DtdGraph load_graph(const std::string& dtd_path, std::string root,
                            xshred::WarningList& warnings) {
  xshred::DtdDecls decls = xshred::parse_dtd_file(dtd_path, &warnings);
  if (decls.elements.empty()) throw xshred::Error("DTD declares no elements");
  if (root.empty()) root = decls.elements.front().name;
  return xshred::build_graph(decls, root, &warnings);
}

int cmd_schema(const std::string& dtd_path, const std::string& root,
               const std::string& strategy_name, const std::string& out_path) {
  xshred::WarningList warnings;
  xshred::DtdGraph g = load_graph(dtd_path, root, warnings);
  xshred::RelationalSchema schema = xshred::map_schema(g, parse_strategy(strategy_name));
  print_warnings(warnings);

  std::filesystem::path out_file(out_path);
  if (out_file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(out_file.parent_path(), ec);
    if (ec) throw xshred::IoError("cannot create directory " + out_file.parent_path().string());
  }
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw xshred::IoError("cannot open " + out_path);
  out << xshred::emit_ddl(schema);
  if (!out) throw xshred::IoError("write failed for " + out_path);

  std::cout << "tables:\n";
  for (const auto& table : schema.tables) {
    std::cout << "  " << table.name << "(";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      std::cout << (i ? ", " : "") << table.columns[i].name;
    std::cout << ")\n";
  }
  if (schema.edge_table) std::cout << "  Edge(parentID, childID, parentType, childType)\n";
  std::cout << "element to table:\n";
  for (const auto& [element, table] : schema.mappings.sigma)
    std::cout << "  " << element << " -> " << table << "\n";
  std::cout << "attribute columns:\n";
  for (const auto& [key, column] : schema.mappings.theta)
    std::cout << "  " << key.first << "@" << key.second << " -> " << column << "\n";
  std::cout << "leaf value columns:\n";
  for (const auto& [element, column] : schema.mappings.delta)
    std::cout << "  " << element << " -> " << column << "\n";
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

struct LemmaCheck {
  std::size_t non_inlinable = 0;
  std::size_t elements = 0;
};

LemmaCheck count_instances(const xshred::DomTree& tree, const xshred::DtdGraph& g) {
  LemmaCheck counts;
  std::vector<const xshred::ElementNode*> stack{tree.root.get()};
  while (!stack.empty()) {
    const xshred::ElementNode* node = stack.back();
    stack.pop_back();
    ++counts.elements;
    if (!xshred::is_inlinable(node->name, g)) ++counts.non_inlinable;
    for (const auto& child : node->children) stack.push_back(child.get());
  }
  return counts;
}

int cmd_shred(const std::string& dtd_path, const std::string& xml_path, const std::string& root,
              const std::string& strategy_name, const std::string& format,
              const std::string& out_dir, bool emit_empty) {
  xshred::WarningList warnings;
  xshred::DtdGraph g = load_graph(dtd_path, root, warnings);
  xshred::RelationalSchema schema = xshred::map_schema(g, parse_strategy(strategy_name));
  xshred::DomTree tree = xshred::load_document_file(xml_path, &warnings);
  if (tree.root->name != g.root())
    throw xshred::Error("document root '" + tree.root->name + "' does not match DTD root '" +
                        g.root() + "'");

  auto sink = xshred::open_sink(schema, format, out_dir, emit_empty);
  xshred::ShredStats stats = xshred::xinsert(tree, g, schema, *sink, nullptr, &warnings);
  xshred::SinkReport report = sink->finalize();
  print_warnings(warnings);

  std::cout << "rows:\n";
  for (const auto& [table, rows] : report.rows)
    std::cout << "  " << table << ": " << rows << "\n";
  std::cout << "elements: " << stats.elements << "\n"
            << "attributes: " << stats.attributes << "\n"
            << "q_enqueues: " << stats.q_enqueues << "\n"
            << "r_enqueues: " << stats.r_enqueues << "\n"
            << "tuples: " << stats.tuples << "\n"
            << "edge_rows: " << stats.edge_rows << "\n";

  LemmaCheck expect = count_instances(tree, g);
  bool q_ok = stats.q_enqueues == expect.non_inlinable;
  bool r_ok = stats.r_enqueues == expect.elements - 1;
  std::cout << "queue check (non-inlinable instances): " << (q_ok ? "PASS" : "FAIL") << "\n";
  std::cout << "queue check (elements minus root): " << (r_ok ? "PASS" : "FAIL") << "\n";
  return q_ok && r_ok ? kExitOk : kExitInvariant;
}

int cmd_bench(const std::string& dtd_path, const std::string& root, const std::string& sizes_spec,
              int reps, std::uint64_t seed, const std::string& strategy_name, bool parallel,
              const std::string& report_path) {
  xshred::WarningList warnings;
  xshred::DtdGraph g = load_graph(dtd_path, root, warnings);
  print_warnings(warnings);

  xshred::BenchConfig config;
  config.dtd_path = dtd_path;
  config.sizes = parse_sizes(sizes_spec);
  config.repetitions = reps;
  config.strategy = parse_strategy(strategy_name);
  config.seed = seed;
  config.parallel = parallel;

  xshred::BenchReport report = xshred::run_bench(g, config);
  if (!report_path.empty()) xshred::write_report(report, report_path);
  std::cout << xshred::summarize(report);
  if (!report_path.empty()) std::cout << "wrote " << report_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DTD-driven XML shredder"};
  app.require_subcommand(1);

  std::string dtd_path, xml_path, root, out_path, strategy = "dtdmap";

  auto* schema_cmd = app.add_subcommand("schema", "map a DTD to a relational schema");
  schema_cmd->add_option("dtd", dtd_path, "DTD file")->required();
  schema_cmd->add_option("--strategy", strategy, "dtdmap or shared")
      ->default_val("dtdmap");
  schema_cmd->add_option("--root", root, "root element (default: first declared)");
  schema_cmd->add_option("--out", out_path, "DDL output file")->required();

  std::string format = "csv";
  bool emit_empty = false;
  auto* shred_cmd = app.add_subcommand("shred", "shred a document into relational rows");
  shred_cmd->add_option("dtd", dtd_path, "DTD file")->required();
  shred_cmd->add_option("xml", xml_path, "XML document")->required();
  shred_cmd->add_option("--strategy", strategy, "dtdmap or shared")->default_val("dtdmap");
  shred_cmd->add_option("--root", root, "root element (default: first declared)");
  shred_cmd->add_option("--format", format, "csv or sql")->default_val("csv");
  shred_cmd->add_option("--out", out_path, "output directory")->required();
  shred_cmd->add_flag("--emit-empty", emit_empty, "create files for empty tables too");

  std::string sizes = "1m,2m,4m,8m,16m", report_path;
  int reps = 5;
  std::uint64_t seed = 0;
  bool parallel = false;
  auto* bench_cmd = app.add_subcommand("bench", "time the mapping pass over synthetic documents");
  bench_cmd->add_option("dtd", dtd_path, "DTD file")->required();
  bench_cmd->add_option("--sizes", sizes, "comma-separated targets, k/m/g suffixes")
      ->default_val("1m,2m,4m,8m,16m");
  bench_cmd->add_option("--reps", reps, "repetitions per size")->default_val(5);
  bench_cmd->add_option("--seed", seed, "generator seed")->default_val(0);
  bench_cmd->add_option("--strategy", strategy, "dtdmap or shared")->default_val("dtdmap");
  bench_cmd->add_option("--root", root, "root element (default: first declared)");
  bench_cmd->add_option("--report", report_path, "machine-readable report file");
  bench_cmd->add_flag("--parallel", parallel, "run cells on separate threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema_cmd->parsed()) return cmd_schema(dtd_path, root, strategy, out_path);
    if (shred_cmd->parsed())
      return cmd_shred(dtd_path, xml_path, root, strategy, format, out_path, emit_empty);
    if (bench_cmd->parsed())
      return cmd_bench(dtd_path, root, sizes, reps, seed, strategy, parallel, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
