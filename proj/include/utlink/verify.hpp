#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "utlink/features.hpp"
#include "utlink/graph.hpp"
#include "utlink/io.hpp"
#include "utlink/pathmeasures.hpp"
#include "utlink/propagation.hpp"
#include "utlink/rng.hpp"

namespace utlink {

// Pinned tolerances of the identity suite. The utgin comparisons are exact
// integer matches and use no tolerance at all.
inline constexpr double tol_walk_identity = 1e-9;
inline constexpr double tol_triadic = 1e-12;
inline constexpr double tol_row_sum = 1e-12;
inline constexpr double tol_associativity = 1e-10;

struct identity_failure {
  std::size_t graph_index = 0;
  std::uint64_t graph_seed = 0;
  std::size_t n = 0;
  std::string check;
  std::size_t layers = 0;
  node_id u = 0;
  node_id v = 0;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
};

struct verify_graph_record {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t edges = 0;
  std::size_t identities = 0;
  std::size_t failures = 0;
};

struct verify_options {
  std::size_t graphs = 100;
  std::size_t min_n = 5;
  std::size_t max_n = 30;
  double edge_prob = 0.2;
  std::size_t max_layers = 3;
  std::uint64_t seed = 0;
  double perturbation = 0.0;  // relative weight distortion; a negative control
  std::uint64_t budget = default_oracle_budget;
};

struct verify_summary {
  std::size_t graphs_checked = 0;
  std::size_t identities_checked = 0;
  std::size_t failures_total = 0;
  std::vector<identity_failure> failures;  // capped; failures_total keeps counting
  std::vector<verify_graph_record> per_graph;

  bool ok() const { return failures_total == 0; }
};

// Failing-by-construction control: every stored weight scaled off its
// normalization, which the identity suite must detect.
inline propagation_operator perturb_operator(const propagation_operator& op, double rel) {
  std::vector<double> values(op.csr_values().begin(), op.csr_values().end());
  for (double& v : values) v *= 1.0 + rel;
  return propagation_operator::from_parts(
      op.variant(), op.epsilon(),
      std::vector<std::size_t>(op.csr_offsets().begin(), op.csr_offsets().end()),
      std::vector<node_id>(op.csr_targets().begin(), op.csr_targets().end()), std::move(values));
}

namespace detail {

// Dense power of the self-loop adjacency in exact integer arithmetic; the
// reference for the count identities.
inline std::vector<std::uint64_t> aug_adjacency_dense(const graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::uint64_t> a(n * n, 0);
  for (node_id u = 0; u < n; ++u) {
    a[u * n + u] = 1;
    for (node_id v : g.neighbors(u)) a[u * n + v] = 1;
  }
  return a;
}

inline std::vector<std::uint64_t> dense_int_multiply(const std::vector<std::uint64_t>& x,
                                                     const std::vector<std::uint64_t>& y,
                                                     std::size_t n) {
  std::vector<std::uint64_t> out(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t xik = x[i * n + k];
      if (xik == 0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += xik * y[k * n + j];
    }
  return out;
}

}  // namespace detail

// The full identity suite on one graph: operator shape invariants, the
// count/meeting/geometric-mean inner-product identities for every layer
// depth, the path-sum oracle agreement, the associativity of propagation,
// and the l=1 triadic correspondence on non-adjacent pairs.
inline void verify_graph(const graph& g, std::size_t graph_index, std::uint64_t graph_seed,
                         const verify_options& opt, verify_summary& sum) {
  constexpr std::size_t failure_cap = 1000;
  const std::size_t n = g.node_count();
  auto check = [&](const char* name, std::size_t l, node_id u, node_id v, double expected,
                   double actual, double tol) {
    ++sum.identities_checked;
    const double diff = std::abs(expected - actual);
    if (!(diff <= tol)) {
      ++sum.failures_total;
      if (sum.failures.size() < failure_cap)
        sum.failures.push_back(
            {graph_index, graph_seed, n, name, l, u, v, expected, actual, tol});
    }
  };

  auto op_gcn = propagation_operator::build(g, mp_variant::utgcn);
  auto op_sage = propagation_operator::build(g, mp_variant::utsage);
  auto op_gin = propagation_operator::build(g, mp_variant::utgin);
  if (opt.perturbation != 0.0) {
    op_gcn = perturb_operator(op_gcn, opt.perturbation);
    op_sage = perturb_operator(op_sage, opt.perturbation);
    op_gin = perturb_operator(op_gin, opt.perturbation);
  }

  // operator shape: symmetry of the symmetric variants, row sums of the
  // row-stochastic one
  for (node_id u = 0; u < n; ++u) {
    for (node_id v : g.neighbors(u)) {
      if (v > u) break;
      check("utgcn-operator-symmetry", 0, u, v, op_gcn.entry(v, u), op_gcn.entry(u, v), 0.0);
      check("utgin-operator-symmetry", 0, u, v, op_gin.entry(v, u), op_gin.entry(u, v), 0.0);
    }
    double row_sum = 0.0;
    auto offsets = op_sage.csr_offsets();
    for (std::size_t e = offsets[u]; e < offsets[u + 1]; ++e)
      row_sum += op_sage.csr_values()[e];
    check("utsage-row-sum", 0, u, u, 1.0, row_sum, tol_row_sum);
  }

  const feature_matrix h0 = one_hot(n);
  feature_matrix h_gcn = h0, h_sage = h0, h_gin = h0;

  // walk distributions at depth l and 2l, advanced incrementally
  std::vector<std::vector<double>> walk_l(n), walk_2l(n);
  for (node_id u = 0; u < n; ++u) {
    walk_l[u].assign(n, 0.0);
    walk_l[u][u] = 1.0;
    walk_2l[u] = walk_l[u];
  }
  std::vector<double> scratch;

  const auto a_tilde = detail::aug_adjacency_dense(g);
  auto power = detail::aug_adjacency_dense(g);  // becomes A~^(2l) after two steps per layer
  power = detail::dense_int_multiply(power, a_tilde, n);

  for (std::size_t l = 1; l <= opt.max_layers; ++l) {
    h_gcn = op_gcn.apply(h_gcn);
    h_sage = op_sage.apply(h_sage);
    h_gin = op_gin.apply(h_gin);
    if (l > 1) {
      power = detail::dense_int_multiply(power, a_tilde, n);
      power = detail::dense_int_multiply(power, a_tilde, n);
    }
    for (node_id u = 0; u < n; ++u) {
      walk_step(g, walk_l[u], scratch);
      std::swap(walk_l[u], scratch);
      walk_step(g, walk_2l[u], scratch);
      std::swap(walk_2l[u], scratch);
      walk_step(g, walk_2l[u], scratch);
      std::swap(walk_2l[u], scratch);
    }

    for (node_id u = 0; u < n; ++u) {
      for (node_id v = u; v < n; ++v) {
        const double ip_gin = dot(h_gin.row(u), h_gin.row(v));
        const double ip_sage = dot(h_sage.row(u), h_sage.row(v));
        const double ip_gcn = dot(h_gcn.row(u), h_gcn.row(v));
        check("utgin-count", l, u, v, static_cast<double>(power[u * n + v]), ip_gin, 0.0);
        double meeting = 0.0;
        for (std::size_t i = 0; i < n; ++i) meeting += walk_l[u][i] * walk_l[v][i];
        check("utsage-meeting", l, u, v, meeting, ip_sage, tol_walk_identity);
        check("utgcn-geometric-mean", l, u, v, std::sqrt(walk_2l[u][v] * walk_2l[v][u]), ip_gcn,
              tol_walk_identity);
        if (l == 1 && u != v && !g.has_edge(u, v)) {
          triadic t = triadic_measures(g, u, v);
          check("utgin-triadic", l, u, v, t.t, ip_gin, tol_triadic);
          check("utsage-triadic", l, u, v, t.t_d, ip_sage, tol_triadic);
          check("utgcn-triadic", l, u, v, t.t_n, ip_gcn, tol_triadic);
        }
      }
      const oracle_rows rows = oracle_inner_product_rows(g, u, l, opt.budget);
      for (node_id v = 0; v < n; ++v) {
        check("oracle-utgin", l, u, v, rows.utgin[v], dot(h_gin.row(u), h_gin.row(v)), 0.0);
        check("oracle-utsage", l, u, v, rows.utsage[v], dot(h_sage.row(u), h_sage.row(v)),
              tol_walk_identity);
        check("oracle-utgcn", l, u, v, rows.utgcn[v], dot(h_gcn.row(u), h_gcn.row(v)),
              tol_walk_identity);
      }
    }
  }

  // one application then the rest equals all applications at once
  const propagation_operator* ops[] = {&op_gcn, &op_sage, &op_gin};
  const char* names[] = {"utgcn-associativity", "utsage-associativity", "utgin-associativity"};
  for (std::size_t oi = 0; oi < 3; ++oi) {
    feature_matrix full = propagate(*ops[oi], h0, opt.max_layers);
    feature_matrix stepped = propagate(*ops[oi], propagate(*ops[oi], h0, 1), opt.max_layers - 1);
    for (node_id u = 0; u < n; ++u)
      for (std::size_t j = 0; j < n; ++j)
        check(names[oi], opt.max_layers, u, static_cast<node_id>(j), full(u, j), stepped(u, j),
              tol_associativity);
  }
}

// Seeded Erdos-Renyi corpus; every reported failure carries the graph seed
// so it can be replayed in isolation.
inline verify_summary run_identity_suite(const verify_options& opt) {
  if (opt.graphs < 1) throw std::invalid_argument("graphs must be >= 1");
  if (opt.min_n < 2 || opt.min_n > opt.max_n)
    throw std::invalid_argument("need 2 <= min_n <= max_n");
  if (!(opt.edge_prob >= 0.0 && opt.edge_prob <= 1.0))
    throw std::invalid_argument("edge_prob must lie in [0, 1]");
  if (opt.max_layers < 1) throw std::invalid_argument("max_layers must be >= 1");
  // Counts must stay exactly representable in double for the integer checks:
  // the worst-case A~^(2L) entry is (max_n + 1)^(2L - 1).
  if (std::pow(static_cast<double>(opt.max_n) + 1.0,
               2.0 * static_cast<double>(opt.max_layers) - 1.0) > 9.0e15)
    throw std::invalid_argument("suite is desk-scale: shrink max_n or max_layers");

  verify_summary sum;
  for (std::size_t gi = 0; gi < opt.graphs; ++gi) {
    const std::uint64_t gseed = derive_seed(opt.seed, gi);
    auto eng = make_engine(gseed);
    std::uniform_int_distribution<std::size_t> size(opt.min_n, opt.max_n);
    const std::size_t n = size(eng);
    const graph g = erdos_renyi(n, opt.edge_prob, derive_seed(gseed, 1));

    const std::size_t identities_before = sum.identities_checked;
    const std::size_t failures_before = sum.failures_total;
    verify_graph(g, gi, gseed, opt, sum);
    ++sum.graphs_checked;
    sum.per_graph.push_back({gi, gseed, n, g.edge_count(),
                             sum.identities_checked - identities_before,
                             sum.failures_total - failures_before});
  }
  return sum;
}

// graph,seed,n,edges,identities,failures rows, one per corpus graph.
inline void write_verify_csv(std::ostream& out, const verify_summary& sum) {
  out << "graph,seed,n,edges,identities,failures\n";
  for (const verify_graph_record& rec : sum.per_graph)
    out << rec.index << ',' << rec.seed << ',' << rec.n << ',' << rec.edges << ','
        << rec.identities << ',' << rec.failures << '\n';
}

inline std::string describe(const identity_failure& f) {
  return f.check + " l=" + std::to_string(f.layers) + " pair=(" + std::to_string(f.u) + "," +
         std::to_string(f.v) + ") graph=" + std::to_string(f.graph_index) +
         " seed=" + std::to_string(f.graph_seed) + " n=" + std::to_string(f.n) +
         " expected=" + fmt_double(f.expected) + " actual=" + fmt_double(f.actual) +
         " tol=" + fmt_double(f.tolerance);
}

}  // namespace utlink
