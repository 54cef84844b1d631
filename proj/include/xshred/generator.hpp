#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "xshred/dtd_graph.hpp"
#include "xshred/errors.hpp"

namespace xshred {

// What the generator actually embedded in the document, kept as an oracle
// for end-to-end value checks. Values are unescaped.
struct GenRecord {
  std::vector<std::pair<std::string, std::string>> attr_values;  // (attr name, value)
  std::vector<std::pair<std::string, std::string>> leaf_values;  // (leaf element, value)
  std::size_t elements = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Byte sizes of the smallest conforming rendering: required attributes with
// one-character values, '1' children recursively, everything optional
// dropped. Non-'*' edges never close a cycle, so the recursion grounds out.
class MinSizes {
 public:
  explicit MinSizes(const DtdGraph& g) : g_(g) {}

  std::size_t of(const std::string& name) {
    auto it = memo_.find(name);
    if (it != memo_.end()) return it->second;
    std::size_t size = 1 + name.size();  // "<name"
    for (const auto& att : g_.attributes_of(name))
      if (att.default_kind == AttDefaultKind::Required)
        size += att.name.size() + 5;  // ' name="v"'
    std::vector<const DtdEdge*> required;
    for (const auto* edge : g_.children_of(name))
      if (edge->label == '1') required.push_back(edge);
    if (required.empty()) {
      size += 2;  // "/>"
    } else {
      size += 1 + 3 + name.size();  // ">" ... "</name>"
      for (const auto* edge : required) size += of(edge->child);
    }
    memo_[name] = size;
    return size;
  }

 private:
  const DtdGraph& g_;
  std::map<std::string, std::size_t> memo_;
};

class DocWriter {
 public:
  DocWriter(const DtdGraph& g, std::uint64_t seed, GenRecord* record)
      : g_(g), sizes_(g), rng_(splitmix64(seed)), record_(record) {}

  std::string generate(std::size_t target) {
    std::size_t minimal = sizes_.of(g_.root());
    if (minimal > target) throw TargetTooSmall(minimal, target);
    std::string out;
    out.reserve(target + 64);
    emit(out, g_.root(), target);
    return out;
  }

 private:
  const DtdGraph& g_;
  MinSizes sizes_;
  std::mt19937_64 rng_;
  GenRecord* record_;
  std::map<std::string, int> path_count_;

  std::uint64_t rand_below(std::uint64_t n) { return n ? rng_() % n : 0; }
  bool coin() { return rng_() & 1; }

  char plain_char() {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    return alphabet[rand_below(sizeof(alphabet) - 1)];
  }

  // Probability 1/2, halved again for each enclosing instance of the same
  // cyclic element, so recursive documents stay depth-bounded.
  bool decayed_coin(const std::string& child) {
    int shifts = 1;
    if (g_.on_cycle(child)) shifts += path_count_[child];
    if (shifts >= 63) return false;
    return rand_below(1ull << shifts) == 0;
  }

  // Lowercase/digit token, occasionally seasoned with one awkward character
  // somewhere strictly inside, so values survive whitespace trimming.
  std::string token(std::size_t min_len, std::size_t span) {
    std::size_t len = min_len + rand_below(span);
    std::string s;
    s.reserve(len + 2);
    for (std::size_t i = 0; i < len; ++i) s += plain_char();
    if (s.size() >= 2 && rand_below(8) == 0) {
      static const char* specials[] = {",", "\"", "'", "&", "<", ">", " ", "\xC3\xA9"};
      s.insert(1 + rand_below(s.size() - 1), specials[rand_below(8)]);
    }
    return s;
  }

  static void escape_into(std::string& out, const std::string& raw, bool attr) {
    for (char c : raw) {
      if (c == '&') out += "&amp;";
      else if (c == '<') out += "&lt;";
      else if (attr && c == '"') out += "&quot;";
      else out += c;
    }
  }

  // True when the subtree under `name` can absorb budget beyond its minimum
  // rendering: text capacity, stretchable attribute values, or optional
  // children anywhere below. Only '1' edges recurse, and those never close a
  // cycle.
  bool can_grow(const std::string& name) {
    auto it = capable_.find(name);
    if (it != capable_.end()) return it->second;
    bool capable = !g_.attributes_of(name).empty() ||
                   (g_.is_leaf(name) && !g_.is_empty_leaf(name));
    for (const auto* edge : g_.children_of(name)) {
      if (edge->label != '1') capable = true;
      else if (can_grow(edge->child)) capable = true;
    }
    capable_[name] = capable;
    return capable;
  }

  // Writes one instance of `name`, consuming at most `budget` bytes
  // (budget >= min size is the caller's obligation).
  void emit(std::string& out, const std::string& name, std::size_t budget) {
    if (record_) ++record_->elements;
    ++path_count_[name];
    std::size_t start = out.size();
    out += '<';
    out += name;

    const auto& edges = g_.children_of(name);
    std::size_t close_cost = edges.empty() ? 2 : 3 + name.size();
    std::size_t req_reserve = 0;
    for (const auto* edge : edges)
      if (edge->label == '1') req_reserve += sizes_.of(edge->child);
    // The minimum rendering bills each required attribute at name + 5 bytes
    // (one-character value); hold that back until the attribute is written.
    std::size_t attrs_reserve = 0;
    for (const auto& att : g_.attributes_of(name))
      if (att.default_kind == AttDefaultKind::Required) attrs_reserve += att.name.size() + 5;
    auto spent = [&] { return out.size() - start; };
    auto room = [&](std::size_t extra) {
      return spent() + extra + close_cost + req_reserve + attrs_reserve + 1 <= budget;
    };

    for (const auto& att : g_.attributes_of(name)) {
      bool required = att.default_kind == AttDefaultKind::Required;
      std::string value = att.default_kind == AttDefaultKind::Defaulted && att.default_value
                              ? *att.default_value
                              : token(3, 8);
      if (required) attrs_reserve -= att.name.size() + 5;
      std::string piece = " " + att.name + "=\"";
      escape_into(piece, value, true);
      piece += '"';
      if (required) {
        if (piece.size() > att.name.size() + 5 && !room(piece.size())) {
          value.assign(1, plain_char());  // fall back to the billed size
          piece = " " + att.name + "=\"" + value + "\"";
        }
      } else if (!(room(piece.size()) && coin())) {
        continue;
      }
      out += piece;
      if (record_) record_->attr_values.emplace_back(att.name, value);
    }

    if (edges.empty()) {
      emit_leaf_body(out, name, start, budget);
      --path_count_[name];
      return;
    }

    // Decide child instances against a byte pool: '1' children get their
    // minimum, '?' children flip a coin, '*' children are poured until the
    // pool runs dry. A poured instance sometimes grabs a random slice of the
    // rest on top of its minimum, so documents grow deep as well as wide. The
    // pool keeps one byte back for '>'; when even that does not fit (possible
    // only with no '1' children, whose minimum rendering assumed "/>"),
    // self-close instead.
    std::size_t overhead = spent() + close_cost + 1;
    if (overhead + req_reserve > budget) {
      out += "/>";
      --path_count_[name];
      return;
    }
    std::size_t pool = budget - overhead;
    std::vector<std::vector<std::size_t>> grants(edges.size());
    // '1' children first: their units are exactly what req_reserve held back,
    // so optional children never eat into them.
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i]->label != '1') continue;
      std::size_t unit = sizes_.of(edges[i]->child);
      grants[i].push_back(unit);
      pool -= unit;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const DtdEdge& edge = *edges[i];
      if (edge.label != '?') continue;
      std::size_t unit = sizes_.of(edge.child);
      if (pool >= unit && decayed_coin(edge.child)) {
        grants[i].push_back(unit);
        pool -= unit;
      }
    }
    for (bool poured = true; poured;) {
      poured = false;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const DtdEdge& edge = *edges[i];
        if (edge.label != '*') continue;
        std::size_t unit = sizes_.of(edge.child);
        if (pool < unit) continue;
        if (g_.on_cycle(edge.child) && !decayed_coin(edge.child)) continue;
        std::size_t grant = unit;
        // Cap the extra slice: large budgets should buy more instances, not a
        // handful of bloated ones, so node counts track byte counts.
        if (can_grow(edge.child) && coin())
          grant += rand_below(std::min<std::size_t>(pool - unit, kMaxSlice) + 1);
        grants[i].push_back(grant);
        pool -= grant;
        poured = true;
      }
    }

    // Whatever is left tops up instances that can absorb it.
    auto spread_bonus = [&] {
      std::vector<std::pair<std::size_t, std::size_t>> growers;
      for (std::size_t i = 0; i < edges.size(); ++i)
        if (can_grow(edges[i]->child))
          for (std::size_t k = 0; k < grants[i].size(); ++k) growers.emplace_back(i, k);
      while (!growers.empty() && pool > 0) {
        auto [gi, gk] = growers[rand_below(growers.size())];
        std::size_t grab = 1 + rand_below(pool);
        grants[gi][gk] += grab;
        pool -= grab;
      }
    };
    spread_bonus();
    if (pool > 0) {
      // Tails all around can strand the pool; a forced second pass over the
      // optional edges keeps byte targets honest.
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const DtdEdge& edge = *edges[i];
        if (edge.label == '1' || !grants[i].empty()) continue;
        std::size_t unit = sizes_.of(edge.child);
        if (pool < unit) continue;
        if (g_.on_cycle(edge.child) && !decayed_coin(edge.child)) continue;
        grants[i].push_back(unit);
        pool -= unit;
      }
      spread_bonus();
    }

    bool has_child = false;
    for (const auto& list : grants) has_child = has_child || !list.empty();
    if (!has_child) {
      out += "/>";
      --path_count_[name];
      return;
    }

    out += '>';
    for (std::size_t i = 0; i < edges.size(); ++i)
      for (std::size_t grant : grants[i]) emit(out, edges[i]->child, grant);
    out += "</";
    out += name;
    out += '>';
    --path_count_[name];
  }

  // One token(4, 12) plus one escaped special never exceeds 20 bytes.
  static constexpr std::size_t kMaxChunk = 20;
  // Largest extra slice a single poured instance may grab on top of its
  // minimum.
  static constexpr std::size_t kMaxSlice = 2048;

  void emit_leaf_body(std::string& out, const std::string& name, std::size_t start,
                      std::size_t budget) {
    bool pcdata = !g_.is_empty_leaf(name);
    std::size_t close_cost = 3 + name.size();
    std::uint64_t pick = rand_below(8);
    if (!pcdata || out.size() - start + 1 + close_cost > budget) {
      out += "/>";  // NULL value
      return;
    }
    // NULL and "" show up on tight budgets only; a leaf granted real bytes
    // must spend them or the document falls short of its size target.
    std::size_t grow = budget - (out.size() - start) - 1 - close_cost;
    if (pick == 0 && grow < kMaxChunk) {
      out += "/>";
      return;
    }
    if (grow == 0 || (pick == 1 && grow < kMaxChunk)) {
      out += "></" + name + ">";  // empty string value
      if (record_) record_->leaf_values.emplace_back(name, std::string());
      return;
    }
    std::string text;
    std::string escaped;
    if (grow >= kMaxChunk) {
      text = token(4, 12);
      escape_into(escaped, text, false);
      while (escaped.size() + kMaxChunk <= grow) {
        std::string more = token(4, 12);
        text += more;
        escape_into(escaped, more, false);
      }
    }
    // Top off with plain characters: they escape to themselves, so the body
    // lands on `grow` exactly and granted bytes never go to waste.
    while (escaped.size() < grow) {
      char c = plain_char();
      text += c;
      escaped += c;
    }
    out += '>';
    out += escaped;
    out += "</" + name + ">";
    if (record_) record_->leaf_values.emplace_back(name, text);
  }

  std::map<std::string, bool> capable_;
};

}  // namespace detail

// Deterministic synthetic document for a DTD graph: every '1' child appears
// once, '?' children appear with probability 1/2, '*' children repeat until
// the byte budget runs out. Output lands within the target unless the graph
// has no '*' capacity to fill it.
inline std::string generate_document(const DtdGraph& g, std::size_t target_bytes,
                                     std::uint64_t seed, GenRecord* record = nullptr) {
  detail::DocWriter writer(g, seed, record);
  return writer.generate(target_bytes);
}

}  // namespace xshred
