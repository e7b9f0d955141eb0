#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "utlink/graph.hpp"
#include "utlink/io.hpp"
#include "utlink/rng.hpp"

namespace utlink {

// Dense row-major n x k matrix of node features. Entries are kept finite by
// every constructor path; mutable row access exists for the propagation
// ping-pong buffers.
class feature_matrix {
 public:
  feature_matrix() = default;
  feature_matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  const std::vector<double>& values() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Fixed ascending-index loop: both the raw scorer and the linear head score
// through this, so identical inputs give bitwise-identical results.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

// n x n identity; rows are exactly orthonormal.
inline feature_matrix one_hot(std::size_t n) {
  feature_matrix f(n, n);
  for (std::size_t i = 0; i < n; ++i) f(i, i) = 1.0;
  return f;
}

enum class feature_kind { gaussian, sparse_binary };

// gaussian: i.i.d. standard normal entries. sparse_binary: each entry is 1
// with probability `density`, else 0. Same (n, k, kind, density, seed) always
// reproduces the same matrix.
inline feature_matrix random_features(std::size_t n, std::size_t k, feature_kind kind,
                                      double density, std::uint64_t seed) {
  if (kind == feature_kind::sparse_binary && !(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("density must lie in (0, 1]");
  auto eng = make_engine(seed);
  feature_matrix f(n, k);
  if (kind == feature_kind::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) f(i, j) = normal(eng);
  } else {
    std::bernoulli_distribution coin(density);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) f(i, j) = coin(eng) ? 1.0 : 0.0;
  }
  return f;
}

enum class norm_scheme { none, l1, l2 };

inline norm_scheme norm_scheme_from_string(const std::string& s) {
  if (s == "none") return norm_scheme::none;
  if (s == "l1") return norm_scheme::l1;
  if (s == "l2") return norm_scheme::l2;
  throw std::invalid_argument("unknown normalization scheme: " + s);
}

// Scales each row to unit L1/L2 norm; all-zero rows pass through unchanged so
// featureless nodes never turn into NaN.
inline feature_matrix normalize_rows(const feature_matrix& f, norm_scheme scheme) {
  feature_matrix out = f;
  if (scheme == norm_scheme::none) return out;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    double norm = 0.0;
    if (scheme == norm_scheme::l1) {
      for (double x : row) norm += std::abs(x);
    } else {
      for (double x : row) norm += x * x;
      norm = std::sqrt(norm);
    }
    if (norm == 0.0) continue;
    for (double& x : row) x /= norm;
  }
  return out;
}

// Feature file: one node per line, node token followed by k reals. Every
// graph node must appear exactly once; k is fixed by the first data line.
inline feature_matrix load_features(std::istream& in, const graph& g) {
  std::vector<bool> seen(g.node_count(), false);
  feature_matrix f;
  std::string line;
  std::size_t line_no = 0;
  std::size_t k = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    if (token.front() == '#') continue;
    node_id v;
    try {
      v = g.id_of(token);
    } catch (const std::out_of_range&) {
      throw parse_error("line " + std::to_string(line_no) + ": unknown node token '" + token +
                        "'");
    }
    if (seen[v])
      throw parse_error("line " + std::to_string(line_no) + ": duplicate features for node '" +
                        token + "'");
    seen[v] = true;
    std::vector<double> values;
    double x;
    while (ls >> x) values.push_back(x);
    if (!ls.eof())
      throw parse_error("line " + std::to_string(line_no) + ": malformed feature value");
    if (first) {
      if (values.empty())
        throw parse_error("line " + std::to_string(line_no) + ": no feature values");
      k = values.size();
      f = feature_matrix(g.node_count(), k);
      first = false;
    } else if (values.size() != k) {
      throw parse_error("line " + std::to_string(line_no) + ": expected " + std::to_string(k) +
                        " values, got " + std::to_string(values.size()));
    }
    for (double y : values)
      if (!std::isfinite(y))
        throw parse_error("line " + std::to_string(line_no) + ": non-finite feature value");
    std::copy(values.begin(), values.end(), f.row(v).begin());
  }
  for (node_id v = 0; v < g.node_count(); ++v)
    if (!seen[v]) throw parse_error("no features for node '" + g.label_of(v) + "'");
  return f;
}

inline feature_matrix load_features_file(const std::string& path, const graph& g) {
  std::istringstream in(read_file(path));
  return load_features(in, g);
}

inline void write_features(std::ostream& out, const graph& g, const feature_matrix& f) {
  for (node_id v = 0; v < g.node_count(); ++v) {
    out << g.label_of(v);
    for (double x : f.row(v)) out << ' ' << fmt_double(x);
    out << '\n';
  }
}

struct ortho_report {
  std::vector<double> connected;  // scores over random edges
  std::vector<double> random;     // scores over random node pairs
  bool cosine = false;            // false: raw inner products
  bool connected_empty = false;   // graph had no edges to sample
};

inline double mean_abs(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += std::abs(x);
  return acc / static_cast<double>(xs.size());
}

// Empirical distributions of pair similarity: `samples` uniformly random
// connected pairs against `samples` uniformly random node pairs (u != v).
// Zero-norm rows get cosine 0 rather than NaN.
inline ortho_report orthogonality_report(const graph& g, const feature_matrix& f,
                                         std::size_t samples, std::uint64_t seed,
                                         bool cosine = false) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (f.rows() != g.node_count())
    throw std::invalid_argument("feature rows do not match node count");
  if (g.node_count() < 2) throw std::invalid_argument("need at least two nodes");

  auto score = [&](node_id u, node_id v) {
    double ip = dot(f.row(u), f.row(v));
    if (!cosine) return ip;
    double nu = std::sqrt(dot(f.row(u), f.row(u)));
    double nv = std::sqrt(dot(f.row(v), f.row(v)));
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return ip / (nu * nv);
  };

  ortho_report rep;
  rep.cosine = cosine;
  auto eng = make_engine(seed);

  if (g.edge_count() == 0) {
    rep.connected_empty = true;
  } else {
    const auto edges = g.edges();
    std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
    rep.connected.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
      const edge& e = edges[pick(eng)];
      rep.connected.push_back(score(e.u, e.v));
    }
  }

  std::uniform_int_distribution<node_id> node(0, static_cast<node_id>(g.node_count() - 1));
  rep.random.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    node_id u = node(eng);
    node_id v = node(eng);
    while (v == u) v = node(eng);
    rep.random.push_back(score(u, v));
  }
  return rep;
}

// Shared-bin histogram over both distributions:
// bin_low,bin_high,count_connected,count_random.
inline void write_ortho_histogram(std::ostream& out, const ortho_report& rep,
                                  std::size_t bins = 20) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto* vals : {&rep.connected, &rep.random}) {
    for (double x : *vals) {
      if (!any) {
        lo = hi = x;
        any = true;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  if (!any) throw std::invalid_argument("histogram over empty report");
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  auto bin_of = [&](double x) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    return std::min(b, bins - 1);  // hi itself lands in the last bin
  };
  std::vector<std::size_t> count_connected(bins, 0), count_random(bins, 0);
  for (double x : rep.connected) ++count_connected[bin_of(x)];
  for (double x : rep.random) ++count_random[bin_of(x)];

  out << "bin_low,bin_high,count_connected,count_random\n";
  for (std::size_t b = 0; b < bins; ++b) {
    out << fmt_double(lo + width * static_cast<double>(b)) << ','
        << fmt_double(b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1)) << ','
        << count_connected[b] << ',' << count_random[b] << '\n';
  }
}

}  // namespace utlink
