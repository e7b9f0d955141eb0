#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "utlink/features.hpp"
#include "utlink/graph.hpp"
#include "utlink/propagation.hpp"

namespace utlink {

// The enumeration oracles are desk-scale by design; the budget caps visited
// walk prefixes (a superset of completed paths) so dense inputs fail fast
// instead of hanging.
struct oracle_budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t default_oracle_budget = 10'000'000;

// All length-l vertex sequences u -> v with every step an edge of the
// self-loop adjacency (or the raw adjacency when self_loops is false).
struct path_ensemble {
  node_id u = 0;
  node_id v = 0;
  std::size_t l = 0;
  std::vector<std::vector<node_id>> paths;
};

namespace detail {

struct walk_budget {
  std::uint64_t limit;
  std::uint64_t visited = 0;
  void charge() {
    if (++visited > limit) throw oracle_budget_error("path enumeration budget exceeded");
  }
};

// Visits successors of `cur` in ascending vertex order, with the self-loop
// merged into its sorted position.
template <typename Fn>
void for_each_successor(const graph& g, node_id cur, bool self_loops, Fn&& fn) {
  bool placed = !self_loops;
  for (node_id next : g.neighbors(cur)) {
    if (!placed && next > cur) {
      fn(cur);
      placed = true;
    }
    fn(next);
  }
  if (!placed) fn(cur);
}

}  // namespace detail

// Exhaustive DFS count of length-l walks u -> each endpoint; equals the l-th
// adjacency power row. count_paths reads one entry of it.
inline std::vector<std::uint64_t> count_paths_row(const graph& g, node_id u, std::size_t l,
                                                  bool self_loops = true,
                                                  std::uint64_t budget = default_oracle_budget) {
  if (u >= g.node_count()) throw std::out_of_range("source out of range");
  std::vector<std::uint64_t> counts(g.node_count(), 0);
  detail::walk_budget wb{budget};
  auto dfs = [&](auto&& self, node_id cur, std::size_t depth) -> void {
    wb.charge();
    if (depth == l) {
      ++counts[cur];
      return;
    }
    detail::for_each_successor(g, cur, self_loops,
                               [&](node_id next) { self(self, next, depth + 1); });
  };
  dfs(dfs, u, 0);
  return counts;
}

inline std::uint64_t count_paths(const graph& g, node_id u, node_id v, std::size_t l,
                                 bool self_loops = true,
                                 std::uint64_t budget = default_oracle_budget) {
  if (v >= g.node_count()) throw std::out_of_range("target out of range");
  return count_paths_row(g, u, l, self_loops, budget)[v];
}

// Materialized ensemble, paths listed in lexicographic vertex order.
inline path_ensemble enumerate_paths(const graph& g, node_id u, node_id v, std::size_t l,
                                     bool self_loops = true,
                                     std::uint64_t budget = default_oracle_budget) {
  if (u >= g.node_count() || v >= g.node_count()) throw std::out_of_range("endpoint out of range");
  path_ensemble ens{u, v, l, {}};
  detail::walk_budget wb{budget};
  std::vector<node_id> stack;
  auto dfs = [&](auto&& self, node_id cur, std::size_t depth) -> void {
    wb.charge();
    stack.push_back(cur);
    if (depth == l) {
      if (cur == v) ens.paths.push_back(stack);
    } else {
      detail::for_each_successor(g, cur, self_loops,
                                 [&](node_id next) { self(self, next, depth + 1); });
    }
    stack.pop_back();
  };
  dfs(dfs, u, 0);
  return ens;
}

// One step of the self-loop random walk, pulled per target so each output is
// written once: y[j] = x[j]/d~(j) + sum_{i in N(j)} x[i]/d~(i).
inline void walk_step(const graph& g, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t n = g.node_count();
  y.assign(n, 0.0);
  for (node_id j = 0; j < n; ++j) {
    double acc = x[j] / g.aug_degree(j);
    for (node_id i : g.neighbors(j)) acc += x[i] / g.aug_degree(i);
    y[j] = acc;
  }
}

// Row u of the l-step transition power; sums to 1 within 1e-12.
inline std::vector<double> walk_distribution(const graph& g, node_id u, std::size_t l) {
  if (u >= g.node_count()) throw std::out_of_range("source out of range");
  std::vector<double> x(g.node_count(), 0.0), y;
  x[u] = 1.0;
  for (std::size_t step = 0; step < l; ++step) {
    walk_step(g, x, y);
    std::swap(x, y);
  }
  return x;
}

inline double walk_probability(const graph& g, node_id u, node_id v, std::size_t l) {
  if (v >= g.node_count()) throw std::out_of_range("target out of range");
  return walk_distribution(g, u, l)[v];
}

struct triadic {
  double t = 0.0;    // common neighbor count
  double t_d = 0.0;  // t / (d~(u) d~(v))
  double t_n = 0.0;  // degree-weighted common neighbors
};

template <typename Fn>
void for_each_common_neighbor(const graph& g, node_id u, node_id v, Fn&& fn) {
  auto a = g.neighbors(u);
  auto b = g.neighbors(v);
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      fn(a[i]);
      ++i;
      ++j;
    }
  }
}

inline triadic triadic_measures(const graph& g, node_id u, node_id v) {
  if (u == v) throw std::invalid_argument("triadic measures need distinct endpoints");
  triadic out;
  double weighted = 0.0;
  for_each_common_neighbor(g, u, v, [&](node_id i) {
    out.t += 1.0;
    weighted += 1.0 / g.aug_degree(i);
  });
  out.t_d = out.t / (g.aug_degree(u) * g.aug_degree(v));
  out.t_n = weighted / std::sqrt(g.aug_degree(u) * g.aug_degree(v));
  return out;
}

struct neighborhood_scores {
  double aa = 0.0;  // sum of 1/log d~(i) over common neighbors
  double ra = 0.0;  // sum of 1/d~(i) over common neighbors
};

// Degrees default to the self-loop-augmented d~; classical_degree switches to
// plain d. Either way a common neighbor has degree >= 2, so the log is
// positive.
inline neighborhood_scores neighborhood_heuristics(const graph& g, node_id u, node_id v,
                                                   bool classical_degree = false) {
  if (u == v) throw std::invalid_argument("neighborhood heuristics need distinct endpoints");
  neighborhood_scores out;
  for_each_common_neighbor(g, u, v, [&](node_id i) {
    double d = classical_degree ? static_cast<double>(g.degree(i)) : g.aug_degree(i);
    out.aa += 1.0 / std::log(d);
    out.ra += 1.0 / d;
  });
  return out;
}

enum class series_kind { katz, rooted_pagerank, simrank };

inline series_kind series_kind_from_string(const std::string& s) {
  if (s == "katz") return series_kind::katz;
  if (s == "rpr") return series_kind::rooted_pagerank;
  if (s == "simrank") return series_kind::simrank;
  throw std::invalid_argument("unknown series kind: " + s);
}

struct series_params {
  double gamma = 0.5;
  std::size_t max_len = 10;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  }
};

namespace detail {

// y[j] = sum_{i in N(j)} x[i]: one power step of the loop-free adjacency.
inline void adjacency_step(const graph& g, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t n = g.node_count();
  y.assign(n, 0.0);
  for (node_id j = 0; j < n; ++j) {
    double acc = 0.0;
    for (node_id i : g.neighbors(j)) acc += x[i];
    y[j] = acc;
  }
}

}  // namespace detail

// Truncated damped series over path counts (katz, loop-free adjacency, terms
// l = 1..L), walk probabilities (rooted pagerank, terms l = 0..L, both
// directions averaged, (1-gamma) prefactor), or walk meeting probabilities
// (simrank, terms l = 1..L). Sources sharing several query pairs are iterated
// once each, in ascending order, so outputs are reproducible bit for bit.
inline std::vector<double> truncated_series(const graph& g, series_kind kind, series_params p,
                                            std::span<const node_pair> pairs) {
  p.validate();
  const std::size_t n = g.node_count();
  for (const auto& [u, v] : pairs)
    if (u >= n || v >= n) throw std::out_of_range("pair index out of range");
  std::vector<double> out(pairs.size(), 0.0);

  if (kind == series_kind::simrank) {
    std::vector<double> xu(n), xv(n), scratch;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      xu.assign(n, 0.0);
      xv.assign(n, 0.0);
      xu[pairs[i].first] = 1.0;
      xv[pairs[i].second] = 1.0;
      double damp = 1.0, acc = 0.0;
      for (std::size_t l = 1; l <= p.max_len; ++l) {
        walk_step(g, xu, scratch);
        std::swap(xu, scratch);
        walk_step(g, xv, scratch);
        std::swap(xv, scratch);
        damp *= p.gamma;
        double meet = 0.0;
        for (std::size_t j = 0; j < n; ++j) meet += xu[j] * xv[j];
        acc += damp * meet;
      }
      out[i] = acc;
    }
    return out;
  }

  if (kind == series_kind::katz) {
    std::map<node_id, std::vector<std::size_t>> by_source;
    for (std::size_t i = 0; i < pairs.size(); ++i) by_source[pairs[i].first].push_back(i);
    std::vector<double> x(n), scratch;
    for (const auto& [src, indices] : by_source) {
      x.assign(n, 0.0);
      x[src] = 1.0;
      double damp = 1.0;
      for (std::size_t l = 1; l <= p.max_len; ++l) {
        detail::adjacency_step(g, x, scratch);
        std::swap(x, scratch);
        damp *= p.gamma;
        for (std::size_t idx : indices) out[idx] += damp * x[pairs[idx].second];
      }
    }
    return out;
  }

  // rooted pagerank: each pair reads the walk from both endpoints
  std::map<node_id, std::vector<std::pair<std::size_t, node_id>>> requests;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    requests[pairs[i].first].emplace_back(i, pairs[i].second);
    requests[pairs[i].second].emplace_back(i, pairs[i].first);
  }
  const double prefactor = 0.5 * (1.0 - p.gamma);
  std::vector<double> x(n), scratch;
  for (const auto& [src, reads] : requests) {
    x.assign(n, 0.0);
    x[src] = 1.0;
    double damp = 1.0;
    for (const auto& [idx, target] : reads) out[idx] += prefactor * x[target];
    for (std::size_t l = 1; l <= p.max_len; ++l) {
      walk_step(g, x, scratch);
      std::swap(x, scratch);
      damp *= p.gamma;
      for (const auto& [idx, target] : reads) out[idx] += prefactor * damp * x[target];
    }
  }
  return out;
}

struct oracle_rows {
  std::vector<double> utgin;   // walk counts
  std::vector<double> utsage;  // product of 1/d~ over all positions except the midpoint
  std::vector<double> utgcn;   // product of 1/d~ over interior positions, endpoint-scaled
};

// Per-source path-sum evaluation of the inner products of propagated one-hot
// features, by explicit enumeration of all length-2l walks in the self-loop
// adjacency. One DFS carries the weights of all three variants. This is an
// independent route to the same numbers as propagate + dot; the agreement is
// what the verification suite checks. The utgin weighting assumes eps = 0.
inline oracle_rows oracle_inner_product_rows(const graph& g, node_id u, std::size_t l,
                                             std::uint64_t budget = default_oracle_budget) {
  if (u >= g.node_count()) throw std::out_of_range("source out of range");
  const std::size_t n = g.node_count();
  oracle_rows acc{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                  std::vector<double>(n, 0.0)};
  if (l == 0) {
    acc.utgin[u] = acc.utsage[u] = acc.utgcn[u] = 1.0;
    return acc;
  }
  const std::size_t total = 2 * l;
  detail::walk_budget wb{budget};
  auto dfs = [&](auto&& self, node_id cur, std::size_t pos, double w_sage, double w_gcn) -> void {
    wb.charge();
    if (pos == total) {
      acc.utgin[cur] += 1.0;
      acc.utsage[cur] += w_sage;
      acc.utgcn[cur] += w_gcn;
      return;
    }
    detail::for_each_successor(g, cur, true, [&](node_id next) {
      const std::size_t at = pos + 1;
      const double inv = 1.0 / g.aug_degree(next);
      self(self, next, at, at == l ? w_sage : w_sage * inv, at == total ? w_gcn : w_gcn * inv);
    });
  };
  dfs(dfs, u, 0, 1.0 / g.aug_degree(u), 1.0);
  const double scale = 1.0 / std::sqrt(g.aug_degree(u));
  for (node_id v = 0; v < n; ++v) acc.utgcn[v] *= scale / std::sqrt(g.aug_degree(v));
  return acc;
}

inline std::vector<double> oracle_inner_product_row(const graph& g, mp_variant variant, node_id u,
                                                    std::size_t l,
                                                    std::uint64_t budget = default_oracle_budget) {
  oracle_rows rows = oracle_inner_product_rows(g, u, l, budget);
  switch (variant) {
    case mp_variant::utgin: return std::move(rows.utgin);
    case mp_variant::utsage: return std::move(rows.utsage);
    case mp_variant::utgcn: return std::move(rows.utgcn);
  }
  throw std::logic_error("unreachable");
}

inline double oracle_inner_product(const graph& g, mp_variant variant, node_id u, node_id v,
                                   std::size_t l,
                                   std::uint64_t budget = default_oracle_budget) {
  if (v >= g.node_count()) throw std::out_of_range("target out of range");
  return oracle_inner_product_row(g, variant, u, l, budget)[v];
}

}  // namespace utlink
