#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "utlink/features.hpp"
#include "utlink/graph.hpp"

namespace utlink {

enum class mp_variant { utgcn, utsage, utgin };

inline mp_variant variant_from_string(const std::string& s) {
  if (s == "utgcn") return mp_variant::utgcn;
  if (s == "utsage") return mp_variant::utsage;
  if (s == "utgin") return mp_variant::utgin;
  throw std::invalid_argument("unknown propagation variant: " + s);
}

inline std::string to_string(mp_variant v) {
  switch (v) {
    case mp_variant::utgcn: return "utgcn";
    case mp_variant::utsage: return "utsage";
    case mp_variant::utgin: return "utgin";
  }
  throw std::logic_error("unreachable");
}

// Sparse operator over the self-loop adjacency, one weight per stored entry:
//   utgcn   w(u,v) = 1/sqrt(d~(u) d~(v))   symmetric
//   utsage  w(u,v) = 1/d~(u)               rows sum to 1
//   utgin   w(u,v) = 1 off-diagonal, 1+eps on it
// The diagonal entry exists for every node, so isolated nodes keep their own
// feature as a fixed point. Immutable after build.
class propagation_operator {
 public:
  static propagation_operator build(const graph& g, mp_variant variant, double epsilon = 0.0) {
    propagation_operator op;
    op.variant_ = variant;
    op.epsilon_ = epsilon;
    const std::size_t n = g.node_count();
    op.offsets_.assign(n + 1, 0);
    for (node_id u = 0; u < n; ++u) op.offsets_[u + 1] = op.offsets_[u] + g.degree(u) + 1;
    op.targets_.resize(op.offsets_.back());
    op.values_.resize(op.offsets_.back());
    for (node_id u = 0; u < n; ++u) {
      std::size_t at = op.offsets_[u];
      bool placed = false;
      for (node_id v : g.neighbors(u)) {
        if (!placed && v > u) {
          op.targets_[at++] = u;
          placed = true;
        }
        op.targets_[at++] = v;
      }
      if (!placed) op.targets_[at++] = u;
      for (std::size_t e = op.offsets_[u]; e < op.offsets_[u + 1]; ++e) {
        node_id v = op.targets_[e];
        switch (variant) {
          case mp_variant::utgcn:
            op.values_[e] = 1.0 / std::sqrt(g.aug_degree(u) * g.aug_degree(v));
            break;
          case mp_variant::utsage:
            op.values_[e] = 1.0 / g.aug_degree(u);
            break;
          case mp_variant::utgin:
            op.values_[e] = (u == v) ? 1.0 + epsilon : 1.0;
            break;
        }
      }
    }
    return op;
  }

  // Test hook: assembles an operator from raw CSR parts without enforcing the
  // per-variant weight invariants. Used to build failing-by-construction
  // cases for the verification suite.
  static propagation_operator from_parts(mp_variant variant, double epsilon,
                                         std::vector<std::size_t> offsets,
                                         std::vector<node_id> targets,
                                         std::vector<double> values) {
    if (offsets.empty() || offsets.back() != targets.size() || targets.size() != values.size())
      throw std::invalid_argument("inconsistent operator parts");
    propagation_operator op;
    op.variant_ = variant;
    op.epsilon_ = epsilon;
    op.offsets_ = std::move(offsets);
    op.targets_ = std::move(targets);
    op.values_ = std::move(values);
    return op;
  }

  mp_variant variant() const { return variant_; }
  double epsilon() const { return epsilon_; }
  std::size_t node_count() const { return offsets_.size() - 1; }

  std::span<const std::size_t> csr_offsets() const { return offsets_; }
  std::span<const node_id> csr_targets() const { return targets_; }
  std::span<const double> csr_values() const { return values_; }

  double entry(node_id u, node_id v) const {
    auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]);
    auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]);
    auto it = std::lower_bound(first, last, v);
    if (it == last || *it != v) return 0.0;
    return values_[static_cast<std::size_t>(it - targets_.begin())];
  }

  // One SpMM pass: out = S * h. Per-row accumulation walks entries in stored
  // (ascending target) order, so results do not depend on how rows are
  // scheduled across threads.
  feature_matrix apply(const feature_matrix& h) const {
    if (h.rows() != node_count())
      throw std::invalid_argument("feature rows do not match operator size");
    feature_matrix out(h.rows(), h.cols());
    apply_into(h, out);
    return out;
  }

  void apply_into(const feature_matrix& h, feature_matrix& out) const {
    const std::size_t k = h.cols();
    for (node_id u = 0; u < node_count(); ++u) {
      auto dst = out.row(u);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
        const double w = values_[e];
        auto src = h.row(targets_[e]);
        for (std::size_t j = 0; j < k; ++j) dst[j] += w * src[j];
      }
    }
  }

 private:
  propagation_operator() = default;  // always built via build or from_parts

  mp_variant variant_ = mp_variant::utgcn;
  double epsilon_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<node_id> targets_;
  std::vector<double> values_;
};

// H(l) = S^l H(0) by l successive SpMM passes; l = 0 copies the input.
inline feature_matrix propagate(const propagation_operator& op, const feature_matrix& h0,
                                std::size_t layers) {
  if (h0.rows() != op.node_count())
    throw std::invalid_argument("feature rows do not match operator size");
  feature_matrix cur = h0;
  if (layers == 0) return cur;
  feature_matrix next(h0.rows(), h0.cols());
  for (std::size_t l = 0; l < layers; ++l) {
    op.apply_into(cur, next);
    std::swap(cur, next);
  }
  return cur;
}

// Raw link scores of the fully untrained models.
inline std::vector<double> inner_product_scores(const feature_matrix& h,
                                                std::span<const node_pair> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    if (u >= h.rows() || v >= h.rows()) throw std::out_of_range("pair index out of range");
    out.push_back(dot(h.row(u), h.row(v)));
  }
  return out;
}

}  // namespace utlink
