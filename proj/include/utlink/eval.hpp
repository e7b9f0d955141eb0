#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "utlink/graph.hpp"
#include "utlink/rng.hpp"

namespace utlink {

// Disjoint positive-edge partition plus frozen negative samples. Message
// passing downstream sees only train_pos (unless leakage is being measured);
// val/test negatives never change once drawn, so epochs stay comparable.
struct edge_split {
  std::vector<edge> train_pos;
  std::vector<edge> val_pos;
  std::vector<edge> test_pos;
  std::vector<edge> val_neg;
  std::vector<edge> test_neg;
  std::uint64_t seed = 0;
};

// Uniform sample without replacement of non-edges: unordered pairs (u, v),
// u != v, absent from g and from `exclude`. Exact availability is checked up
// front so rejection sampling always terminates.
inline std::vector<edge> sample_negatives(const graph& g, std::size_t count,
                                          std::span<const edge> exclude, std::mt19937_64& eng) {
  const std::size_t n = g.node_count();
  std::unordered_set<edge, edge_hash> excluded;
  excluded.reserve(exclude.size());
  std::size_t extra = 0;
  for (const edge& e : exclude) {
    edge c = make_edge(e.u, e.v);
    if (excluded.insert(c).second && !g.has_edge(c.u, c.v)) ++extra;
  }
  const std::size_t total_pairs = n * (n - 1) / 2;
  const std::size_t available = total_pairs - g.edge_count() - extra;
  if (count > available) throw std::invalid_argument("insufficient non-edges to sample");

  std::uniform_int_distribution<node_id> pick(0, static_cast<node_id>(n - 1));
  std::unordered_set<edge, edge_hash> drawn;
  drawn.reserve(count);
  std::vector<edge> out;
  out.reserve(count);
  while (out.size() < count) {
    node_id u = pick(eng);
    node_id v = pick(eng);
    if (u == v) continue;
    edge c = make_edge(u, v);
    if (g.has_edge(c.u, c.v) || excluded.count(c) || !drawn.insert(c).second) continue;
    out.push_back(c);
  }
  return out;
}

inline std::vector<edge> sample_negatives(const graph& g, std::size_t count,
                                          std::span<const edge> exclude, std::uint64_t seed) {
  auto eng = make_engine(seed);
  return sample_negatives(g, count, exclude, eng);
}

// Random (1 - test_frac - val_frac)/val_frac/test_frac edge partition with
// rounded set sizes, plus g_train with the held-out edges removed and frozen
// negatives matched in size to their positive sets.
inline std::pair<edge_split, graph> split_edges(const graph& g, double test_frac, double val_frac,
                                                std::uint64_t seed) {
  if (test_frac < 0.0 || val_frac < 0.0 || test_frac + val_frac >= 1.0)
    throw std::invalid_argument("split fractions must be nonnegative and sum below 1");
  std::vector<edge> edges = g.edges();
  const std::size_t m = edges.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(m)));
  const auto n_val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(m)));
  if (n_test + n_val >= m) throw std::invalid_argument("split leaves no training edges");

  auto eng = make_engine(seed);
  std::shuffle(edges.begin(), edges.end(), eng);

  edge_split split;
  split.seed = seed;
  split.test_pos.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.val_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_test),
                       edges.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  split.train_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), edges.end());
  split.val_neg = sample_negatives(g, split.val_pos.size(), {}, eng);
  split.test_neg = sample_negatives(g, split.test_pos.size(), split.val_neg, eng);
  for (auto* s : {&split.train_pos, &split.val_pos, &split.test_pos, &split.val_neg,
                  &split.test_neg})
    std::sort(s->begin(), s->end());

  std::vector<edge> held_out;
  held_out.reserve(n_test + n_val);
  held_out.insert(held_out.end(), split.test_pos.begin(), split.test_pos.end());
  held_out.insert(held_out.end(), split.val_pos.begin(), split.val_pos.end());
  graph g_train = remove_edges(g, held_out);
  return {std::move(split), std::move(g_train)};
}

// Rank-based ROC-AUC with midrank tie handling: the probability a random
// positive outscores a random negative, ties counted half. Matches the
// O(P*N) pairwise count exactly (rank sums are half-integers, exact in
// double).
inline double roc_auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty())
    throw std::invalid_argument("roc_auc needs non-empty score lists");
  struct scored {
    double value;
    bool positive;
  };
  std::vector<scored> all;
  all.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) {
    if (std::isnan(s)) throw std::invalid_argument("NaN score");
    all.push_back({s, true});
  }
  for (double s : neg_scores) {
    if (std::isnan(s)) throw std::invalid_argument("NaN score");
    all.push_back({s, false});
  }
  std::sort(all.begin(), all.end(), [](const scored& a, const scored& b) {
    return a.value < b.value;
  });

  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t)
      if (all[t].positive) pos_rank_sum += midrank;
    i = j;
  }
  const auto p = static_cast<double>(pos_scores.size());
  const auto n = static_cast<double>(neg_scores.size());
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

inline std::vector<node_pair> as_pairs(std::span<const edge> edges) {
  std::vector<node_pair> out;
  out.reserve(edges.size());
  for (const edge& e : edges) out.emplace_back(e.u, e.v);
  return out;
}

}  // namespace utlink
