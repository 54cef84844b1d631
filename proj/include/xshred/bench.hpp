#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xshred/dom.hpp"
#include "xshred/dtd_graph.hpp"
#include "xshred/emit.hpp"
#include "xshred/errors.hpp"
#include "xshred/generator.hpp"
#include "xshred/schema.hpp"
#include "xshred/shred.hpp"

namespace xshred {

struct BenchConfig {
  std::string dtd_path;
  std::vector<std::size_t> sizes;  // target bytes, strictly increasing
  int repetitions = 5;
  Strategy strategy = Strategy::DtdMap;
  std::uint64_t seed = 0;
  bool parallel = false;  // one thread per cell; timings get noisier
};

struct BenchCell {
  std::size_t size_target = 0;
  std::size_t size_actual = 0;
  std::size_t n = 0;  // elements + attributes, measured on the loaded tree
  ShredStats stats;
  std::vector<double> rep_ms;
  double mean_ms = 0.0;
};

struct BenchFit {
  bool computed = false;
  double slope_ms_per_n = 0.0;
  double intercept_ms = 0.0;
  double r2 = 0.0;
  double time_per_n_ratio = 0.0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchCell> cells;
  BenchFit fit;
  std::string verdict;  // PASS, FAIL, or N/A
};

// Linearity thresholds: the mapping pass should time out as a straight line
// in n.
inline constexpr double kMinR2 = 0.98;
inline constexpr double kMaxTimePerNodeRatio = 2.0;

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

inline BenchFit fit_line(const std::vector<BenchCell>& cells) {
  BenchFit fit;
  if (cells.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(cells.size());
  for (const auto& c : cells) {
    double x = static_cast<double>(c.n), y = c.mean_ms;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = sxx - sx * sx / k;
  fit.slope_ms_per_n = denom == 0.0 ? 0.0 : (sxy - sx * sy / k) / denom;
  fit.intercept_ms = sy / k - fit.slope_ms_per_n * sx / k;
  double ss_res = 0, ss_tot = 0, y_bar = sy / k;
  for (const auto& c : cells) {
    double y = c.mean_ms;
    double predicted = fit.intercept_ms + fit.slope_ms_per_n * static_cast<double>(c.n);
    ss_res += (y - predicted) * (y - predicted);
    ss_tot += (y - y_bar) * (y - y_bar);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  double lo = 0, hi = 0;
  for (const auto& c : cells) {
    if (c.n == 0) continue;
    double per = c.mean_ms / static_cast<double>(c.n);
    if (lo == 0 || per < lo) lo = per;
    if (per > hi) hi = per;
  }
  fit.time_per_n_ratio = lo == 0.0 ? 0.0 : hi / lo;
  fit.computed = true;
  return fit;
}

inline BenchCell run_cell(const DtdGraph& g, const RelationalSchema& schema, std::size_t size,
                          std::uint64_t seed, int reps) {
  BenchCell cell;
  cell.size_target = size;
  std::string doc = generate_document(g, size, seed);
  cell.size_actual = doc.size();

  // Warm-up rep, discarded.
  {
    DomTree tree = load_document(doc);
    CountingSink sink(schema);
    xinsert(tree, g, schema, sink);
  }
  for (int rep = 0; rep < reps; ++rep) {
    auto begin = std::chrono::steady_clock::now();
    DomTree tree = load_document(doc);
    CountingSink sink(schema);
    ShredStats stats = xinsert(tree, g, schema, sink);
    auto end = std::chrono::steady_clock::now();
    cell.rep_ms.push_back(std::chrono::duration<double, std::milli>(end - begin).count());
    cell.stats = stats;
    cell.n = stats.elements + stats.attributes;
  }
  cell.mean_ms = mean_of(cell.rep_ms);
  return cell;
}

}  // namespace detail

// Generation and file output stay outside the timed section; each rep times
// document load plus the shredding pass against an in-memory counter.
inline BenchReport run_bench(const DtdGraph& g, const BenchConfig& config) {
  if (config.sizes.empty()) throw Error("bench needs at least one size");
  for (std::size_t i = 1; i < config.sizes.size(); ++i)
    if (config.sizes[i] <= config.sizes[i - 1])
      throw Error("bench sizes must be strictly increasing");
  if (config.repetitions < 1) throw Error("bench needs at least one repetition");

  RelationalSchema schema = map_schema(g, config.strategy);
  BenchReport report;
  report.config = config;
  report.cells.resize(config.sizes.size());

  auto cell_seed = [&](std::size_t i) {
    return detail::splitmix64(config.seed + 0x1000 * (i + 1));
  };
  if (config.parallel) {
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < config.sizes.size(); ++i)
      workers.emplace_back([&, i] {
        report.cells[i] =
            detail::run_cell(g, schema, config.sizes[i], cell_seed(i), config.repetitions);
      });
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t i = 0; i < config.sizes.size(); ++i)
      report.cells[i] =
          detail::run_cell(g, schema, config.sizes[i], cell_seed(i), config.repetitions);
  }

  report.fit = detail::fit_line(report.cells);
  if (!report.fit.computed)
    report.verdict = "N/A";
  else if (report.fit.r2 >= kMinR2 && report.fit.time_per_n_ratio <= kMaxTimePerNodeRatio)
    report.verdict = "PASS";
  else
    report.verdict = "FAIL";
  return report;
}

namespace detail {

inline std::string format_ms(double ms) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << ms;
  return out.str();
}

}  // namespace detail

// Key/value records separated by blank lines: one header record, one per
// cell, one fit record.
inline std::string render_report(const BenchReport& report) {
  std::ostringstream out;
  out << "record: bench\n"
      << "dtd: " << report.config.dtd_path << "\n"
      << "strategy: " << to_string(report.config.strategy) << "\n"
      << "seed: " << report.config.seed << "\n"
      << "repetitions: " << report.config.repetitions << "\n";
  for (const auto& cell : report.cells) {
    out << "\nrecord: cell\n"
        << "size_target: " << cell.size_target << "\n"
        << "size_actual: " << cell.size_actual << "\n"
        << "n: " << cell.n << "\n"
        << "elements: " << cell.stats.elements << "\n"
        << "attributes: " << cell.stats.attributes << "\n"
        << "q_enqueues: " << cell.stats.q_enqueues << "\n"
        << "r_enqueues: " << cell.stats.r_enqueues << "\n"
        << "tuples: " << cell.stats.tuples << "\n"
        << "edge_rows: " << cell.stats.edge_rows << "\n";
    out << "rep_ms:";
    for (std::size_t i = 0; i < cell.rep_ms.size(); ++i)
      out << (i ? "," : " ") << detail::format_ms(cell.rep_ms[i]);
    out << "\nmean_ms: " << detail::format_ms(cell.mean_ms) << "\n";
  }
  out << "\nrecord: fit\n";
  if (report.fit.computed) {
    out << "slope_ms_per_n: " << report.fit.slope_ms_per_n << "\n"
        << "intercept_ms: " << detail::format_ms(report.fit.intercept_ms) << "\n"
        << "r2: " << report.fit.r2 << "\n"
        << "time_per_n_ratio: " << detail::format_ms(report.fit.time_per_n_ratio) << "\n";
  }
  out << "verdict: " << report.verdict << "\n";
  return out.str();
}

inline void write_report(const BenchReport& report, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << render_report(report);
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string summarize(const BenchReport& report) {
  std::ostringstream out;
  out << "bench " << to_string(report.config.strategy) << " seed=" << report.config.seed
      << " reps=" << report.config.repetitions << "\n";
  for (const auto& cell : report.cells)
    out << "  " << cell.size_actual << " bytes, n=" << cell.n << ": mean "
        << detail::format_ms(cell.mean_ms) << " ms\n";
  if (report.fit.computed) {
    out << "  fit: r2=" << report.fit.r2
        << " time/n ratio=" << detail::format_ms(report.fit.time_per_n_ratio) << "\n";
  }
  out << "  verdict: " << report.verdict << "\n";
  return out.str();
}

}  // namespace xshred
