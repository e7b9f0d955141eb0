#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "utlink/rng.hpp"

namespace utlink {

using node_id = std::uint32_t;

// Unordered node pair stored canonically with u < v.
struct edge {
  node_id u = 0;
  node_id v = 0;

  friend bool operator==(const edge&, const edge&) = default;
  friend auto operator<=>(const edge&, const edge&) = default;
};

inline edge make_edge(node_id a, node_id b) { return a < b ? edge{a, b} : edge{b, a}; }

struct edge_hash {
  std::size_t operator()(const edge& e) const noexcept {
    return static_cast<std::size_t>(splitmix64((std::uint64_t(e.u) << 32) | e.v));
  }
};

// Ordered pair used when scoring; scores themselves are symmetric in (u, v).
using node_pair = std::pair<node_id, node_id>;

struct parse_stats {
  std::size_t edge_lines = 0;   // lines holding two tokens
  std::size_t duplicates = 0;   // dropped repeated edges
  std::size_t self_loops = 0;   // dropped explicit self-loops
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct validation_report {
  bool rows_sorted = true;
  bool symmetric = true;
  bool loop_free = true;
  bool csr_consistent = true;
  std::string detail;  // first violation, empty when all pass

  bool ok() const { return rows_sorted && symmetric && loop_free && csr_consistent; }
};

// Immutable undirected simple graph in CSR form. Self-loops are never stored;
// everything derived from the self-loop-augmented adjacency (aug_degree, the
// propagation operators) materializes the diagonal on its own side. Safe for
// unlimited concurrent reads once built.
class graph {
 public:
  graph() : offsets_(1, 0) {}

  // Normalizes input: drops self-loops, canonicalizes and deduplicates pairs.
  // `labels`, when given, must hold one unique token per node.
  static graph from_edges(std::size_t n, std::vector<edge> edges,
                          std::vector<std::string> labels = {}) {
    std::vector<edge> kept;
    kept.reserve(edges.size());
    for (const edge& e : edges) {
      if (e.u == e.v) continue;
      if (e.u >= n || e.v >= n) throw std::invalid_argument("edge endpoint out of range");
      kept.push_back(make_edge(e.u, e.v));
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    graph g;
    g.offsets_.assign(n + 1, 0);
    for (const edge& e : kept) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.targets_.resize(2 * kept.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const edge& e : kept) {
      g.targets_[cursor[e.u]++] = e.v;
      g.targets_[cursor[e.v]++] = e.u;
    }
    for (node_id v = 0; v < n; ++v) {
      auto row = g.mutable_row(v);
      std::sort(row.begin(), row.end());
    }
    g.set_labels(std::move(labels));
    return g;
  }

  // Test hook: wraps raw CSR arrays without enforcing the class invariants.
  // Pair with validate() to exercise the diagnostics paths.
  static graph from_csr_unchecked(std::vector<std::size_t> offsets, std::vector<node_id> targets) {
    graph g;
    g.offsets_ = std::move(offsets);
    g.targets_ = std::move(targets);
    if (g.offsets_.empty()) g.offsets_.assign(1, 0);
    return g;
  }

  std::size_t node_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const node_id> neighbors(node_id v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  std::size_t degree(node_id v) const { return offsets_[v + 1] - offsets_[v]; }

  // d~(v) = d(v) + 1, the degree in the self-loop graph. Never zero, so
  // dividing by it is always safe.
  double aug_degree(node_id v) const { return static_cast<double>(degree(v)) + 1.0; }

  bool has_edge(node_id u, node_id v) const {
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  // All edges with u < v, lexicographically sorted.
  std::vector<edge> edges() const {
    std::vector<edge> out;
    out.reserve(edge_count());
    for (node_id u = 0; u < node_count(); ++u)
      for (node_id v : neighbors(u))
        if (u < v) out.push_back(edge{u, v});
    return out;
  }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::string label_of(node_id v) const {
    return has_labels() ? labels_[v] : std::to_string(v);
  }

  // Token -> dense id. Labelled graphs use the original tokens; label-less
  // graphs accept decimal ids.
  node_id id_of(const std::string& token) const {
    if (has_labels()) {
      auto it = label_index_.find(token);
      if (it == label_index_.end()) throw std::out_of_range("unknown node token: " + token);
      return it->second;
    }
    std::size_t pos = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(token, &pos);
    } catch (const std::exception&) {
      throw std::out_of_range("not a node id: " + token);
    }
    if (pos != token.size() || value >= node_count())
      throw std::out_of_range("not a node id: " + token);
    return static_cast<node_id>(value);
  }

  std::span<const std::size_t> csr_offsets() const { return offsets_; }
  std::span<const node_id> csr_targets() const { return targets_; }

 private:
  std::span<node_id> mutable_row(node_id v) {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  void set_labels(std::vector<std::string> labels) {
    if (labels.empty()) return;
    if (labels.size() != node_count())
      throw std::invalid_argument("label count does not match node count");
    labels_ = std::move(labels);
    label_index_.reserve(labels_.size());
    for (node_id v = 0; v < labels_.size(); ++v) {
      if (!label_index_.emplace(labels_[v], v).second)
        throw std::invalid_argument("duplicate node label: " + labels_[v]);
    }
  }

  std::vector<std::size_t> offsets_;
  std::vector<node_id> targets_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, node_id> label_index_;
};

// Parses "u v" lines. Tokens map to dense ids in first-appearance order;
// '#'-prefixed and blank lines are skipped; duplicate edges and explicit
// self-loops are dropped and counted in `stats`.
inline graph parse_edge_list(std::istream& in, parse_stats* stats = nullptr) {
  parse_stats local;
  std::unordered_map<std::string, node_id> ids;
  std::vector<std::string> labels;
  std::vector<edge> edges;

  auto intern = [&](const std::string& token) {
    auto [it, inserted] = ids.emplace(token, static_cast<node_id>(labels.size()));
    if (inserted) labels.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;       // blank
    if (a.front() == '#') continue; // comment
    if (!(ls >> b) || (ls >> extra)) {
      throw parse_error("line " + std::to_string(line_no) + ": expected two node tokens");
    }
    ++local.edge_lines;
    node_id u = intern(a);
    node_id v = intern(b);
    if (u == v) {
      ++local.self_loops;
      continue;
    }
    edges.push_back(make_edge(u, v));
  }
  if (labels.empty()) throw parse_error("empty edge list");

  std::sort(edges.begin(), edges.end());
  std::size_t before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  local.duplicates = before - edges.size();

  if (stats) *stats = local;
  const std::size_t n = labels.size();
  return graph::from_edges(n, std::move(edges), std::move(labels));
}

// Sorted "u v" lines over dense ids; parse(serialize(g)) reproduces the CSR
// arrays bit for bit.
inline void write_edge_list(std::ostream& out, const graph& g) {
  for (const edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

// New graph with `removed` absent; node count (and labels) unchanged, so
// isolated nodes are fine. An edge not present in `g` signals a bookkeeping
// bug upstream and throws.
inline graph remove_edges(const graph& g, std::span<const edge> removed) {
  std::vector<edge> rm(removed.begin(), removed.end());
  for (edge& e : rm) e = make_edge(e.u, e.v);
  std::sort(rm.begin(), rm.end());
  rm.erase(std::unique(rm.begin(), rm.end()), rm.end());
  for (const edge& e : rm) {
    if (e.u >= g.node_count() || e.v >= g.node_count() || !g.has_edge(e.u, e.v))
      throw std::invalid_argument("remove_edges: edge (" + g.label_of(e.u) + ", " +
                                  g.label_of(e.v) + ") not present");
  }
  std::vector<edge> kept;
  kept.reserve(g.edge_count() - rm.size());
  for (const edge& e : g.edges())
    if (!std::binary_search(rm.begin(), rm.end(), e)) kept.push_back(e);
  return graph::from_edges(g.node_count(), std::move(kept),
                           std::vector<std::string>(g.labels()));
}

inline validation_report validate(const graph& g) {
  validation_report rep;
  auto flag = [&](bool& field, const std::string& msg) {
    if (field && rep.detail.empty()) rep.detail = msg;
    field = false;
  };

  auto offsets = g.csr_offsets();
  auto targets = g.csr_targets();
  const std::size_t n = g.node_count();
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i)
    if (offsets[i] > offsets[i + 1])
      flag(rep.csr_consistent, "offsets not nondecreasing at row " + std::to_string(i));
  if (offsets.back() != targets.size())
    flag(rep.csr_consistent, "offset tail does not match target count");
  for (node_id t : targets)
    if (t >= n) flag(rep.csr_consistent, "target id out of range");
  if (!rep.csr_consistent) return rep;

  for (node_id v = 0; v < n; ++v) {
    auto row = g.neighbors(v);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] == v)
        flag(rep.loop_free, "self-loop stored at node " + std::to_string(v));
      if (i + 1 < row.size() && row[i] >= row[i + 1])
        flag(rep.rows_sorted, "row " + std::to_string(v) + " not strictly ascending");
      if (!g.has_edge(row[i], v))
        flag(rep.symmetric, "edge (" + std::to_string(v) + ", " + std::to_string(row[i]) +
                                ") missing its mirror");
    }
  }
  return rep;
}

// G(n, p) with a seeded engine; pairs visited in fixed (u, v) order.
inline graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  auto eng = make_engine(seed);
  std::bernoulli_distribution coin(p);
  std::vector<edge> edges;
  for (node_id u = 0; u + 1 < n; ++u)
    for (node_id v = u + 1; v < n; ++v)
      if (coin(eng)) edges.push_back(edge{u, v});
  return graph::from_edges(n, std::move(edges));
}

}  // namespace utlink
