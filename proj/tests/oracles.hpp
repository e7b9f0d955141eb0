#pragma once

// Independent reference implementations for the test suite. Everything here
// is built straight from the pair relation has_edge(u, v) with dense O(n^2)
// or O(P*N) algorithms, so agreement with the library is evidence, not
// circularity. Keep these naive; speed is the library's job.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "utlink/graph.hpp"
#include "utlink/propagation.hpp"

namespace oracles {

using dmat = std::vector<std::vector<double>>;
using imat = std::vector<std::vector<std::uint64_t>>;

inline dmat dzero(std::size_t n) { return dmat(n, std::vector<double>(n, 0.0)); }

inline dmat didentity(std::size_t n) {
  dmat m = dzero(n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

// Plain adjacency, no self-loops.
inline dmat adjacency(const utlink::graph& g) {
  const std::size_t n = g.node_count();
  dmat a = dzero(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && g.has_edge(static_cast<utlink::node_id>(u), static_cast<utlink::node_id>(v)))
        a[u][v] = 1.0;
  return a;
}

// Self-loop-augmented adjacency; the diagonal weight is 1 + epsilon.
inline dmat aug_adjacency(const utlink::graph& g, double epsilon = 0.0) {
  dmat a = adjacency(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i][i] = 1.0 + epsilon;
  return a;
}

// Augmented degree computed by row summation of the unweighted augmented
// adjacency (diagonal counts 1 regardless of epsilon).
inline std::vector<double> aug_degrees(const utlink::graph& g) {
  const dmat a = adjacency(g);
  std::vector<double> d(a.size(), 1.0);
  for (std::size_t u = 0; u < a.size(); ++u)
    for (std::size_t v = 0; v < a.size(); ++v) d[u] += a[u][v];
  return d;
}

inline dmat matmul(const dmat& a, const dmat& b) {
  const std::size_t n = a.size();
  dmat c = dzero(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

inline dmat matpow(const dmat& a, std::size_t p) {
  dmat r = didentity(a.size());
  for (std::size_t i = 0; i < p; ++i) r = matmul(r, a);
  return r;
}

// Exact integer powers of a 0/1 (plus unit diagonal) matrix.
inline imat izero(std::size_t n) { return imat(n, std::vector<std::uint64_t>(n, 0)); }

inline imat int_adjacency(const utlink::graph& g, bool self_loops) {
  const std::size_t n = g.node_count();
  imat a = izero(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v)
        a[u][v] = self_loops ? 1 : 0;
      else if (g.has_edge(static_cast<utlink::node_id>(u), static_cast<utlink::node_id>(v)))
        a[u][v] = 1;
    }
  return a;
}

inline imat int_matmul(const imat& a, const imat& b) {
  const std::size_t n = a.size();
  imat c = izero(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t aik = a[i][k];
      if (!aik) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

inline imat int_matpow(const imat& a, std::size_t p) {
  const std::size_t n = a.size();
  imat r = izero(n);
  for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
  for (std::size_t i = 0; i < p; ++i) r = int_matmul(r, a);
  return r;
}

// Dense propagation operator per variant, written out from the degree
// formulas rather than any CSR machinery.
inline dmat dense_operator(const utlink::graph& g, utlink::mp_variant variant,
                           double epsilon = 0.0) {
  const std::size_t n = g.node_count();
  const dmat at = aug_adjacency(g, variant == utlink::mp_variant::utgin ? epsilon : 0.0);
  const std::vector<double> d = aug_degrees(g);
  dmat s = dzero(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      switch (variant) {
        case utlink::mp_variant::utgcn: s[u][v] = at[u][v] / std::sqrt(d[u] * d[v]); break;
        case utlink::mp_variant::utsage: s[u][v] = at[u][v] / d[u]; break;
        case utlink::mp_variant::utgin: s[u][v] = at[u][v]; break;
      }
    }
  return s;
}

// Features propagated by dense row-vector times matrix, layers times:
// H' = S H as explicit loops.
inline dmat dense_propagate(const dmat& s, const dmat& h0, std::size_t layers) {
  dmat h = h0;
  for (std::size_t l = 0; l < layers; ++l) {
    dmat next = dmat(h.size(), std::vector<double>(h[0].size(), 0.0));
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[i][k] == 0.0) continue;
        for (std::size_t j = 0; j < h[0].size(); ++j) next[i][j] += s[i][k] * h[k][j];
      }
    h = std::move(next);
  }
  return h;
}

// Tie-aware ROC-AUC by direct comparison of every positive against every
// negative. O(P*N).
inline double brute_force_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  if (pos.empty() || neg.empty()) throw std::invalid_argument("empty score set");
  double wins = 0.0;
  for (double p : pos)
    for (double q : neg) {
      if (p > q)
        wins += 1.0;
      else if (p == q)
        wins += 0.5;
    }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Central finite difference of a scalar function of one coordinate.
template <typename F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles
