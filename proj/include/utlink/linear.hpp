#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "utlink/eval.hpp"
#include "utlink/features.hpp"
#include "utlink/graph.hpp"
#include "utlink/io.hpp"
#include "utlink/rng.hpp"

namespace utlink {

// Single trained linear map applied to propagated features; pair logits are
// inner products of mapped features, so scoring stays symmetric in (u, v).
struct linear_head {
  feature_matrix theta;       // hidden x input
  std::vector<double> bias;   // empty when the head has no bias term

  std::size_t hidden() const { return theta.rows(); }
  std::size_t input() const { return theta.cols(); }
  bool has_bias() const { return !bias.empty(); }
};

// With the identity map and no bias the head scores exactly like the raw
// inner products of the fully untrained models.
inline linear_head identity_head(std::size_t k) { return {one_hot(k), {}}; }

// Fan-in init: entries uniform in +-sqrt(1/k); bias starts at zero.
inline linear_head random_head(std::size_t hidden, std::size_t input, bool use_bias,
                               std::uint64_t seed) {
  if (hidden < 1 || input < 1) throw std::invalid_argument("head dims must be >= 1");
  auto eng = make_engine(seed);
  const double bound = std::sqrt(1.0 / static_cast<double>(input));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  linear_head head;
  head.theta = feature_matrix(hidden, input);
  for (std::size_t a = 0; a < hidden; ++a)
    for (std::size_t j = 0; j < input; ++j) head.theta(a, j) = uniform(eng);
  if (use_bias) head.bias.assign(hidden, 0.0);
  return head;
}

inline void project_row(const linear_head& head, std::span<const double> z,
                        std::span<double> out) {
  for (std::size_t a = 0; a < head.hidden(); ++a) {
    double acc = dot(head.theta.row(a), z);
    if (head.has_bias()) acc += head.bias[a];
    out[a] = acc;
  }
}

inline feature_matrix project(const linear_head& head, const feature_matrix& z) {
  if (z.cols() != head.input()) throw std::invalid_argument("feature width does not match head");
  feature_matrix out(z.rows(), head.hidden());
  for (std::size_t i = 0; i < z.rows(); ++i) project_row(head, z.row(i), out.row(i));
  return out;
}

// logit(u, v) = <theta z_u + b, theta z_v + b>. Only rows named by `pairs`
// are projected.
inline std::vector<double> score_pairs(const linear_head& head, const feature_matrix& z,
                                       std::span<const node_pair> pairs) {
  if (z.cols() != head.input()) throw std::invalid_argument("feature width does not match head");
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> slot(z.rows(), unset);
  std::size_t used = 0;
  for (const auto& [u, v] : pairs) {
    if (u >= z.rows() || v >= z.rows()) throw std::out_of_range("pair index out of range");
    if (slot[u] == unset) slot[u] = used++;
    if (slot[v] == unset) slot[v] = used++;
  }
  feature_matrix mapped(used, head.hidden());
  for (std::size_t i = 0; i < z.rows(); ++i)
    if (slot[i] != unset) project_row(head, z.row(i), mapped.row(slot[i]));
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [u, v] : pairs) out.push_back(dot(mapped.row(slot[u]), mapped.row(slot[v])));
  return out;
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

struct bce_gradients {
  double loss = 0.0;
  feature_matrix grad_theta;      // hidden x input
  std::vector<double> grad_bias;  // empty when the head has no bias
};

// Mean binary cross entropy with logits over positive (label 1) and negative
// (label 0) pairs, with the analytic gradient. The per-pair residuals are
// folded into per-node accumulators first, so the parameter gradient is one
// pass over the feature rows in ascending node order.
inline bce_gradients loss_and_grad(const linear_head& head, const feature_matrix& z,
                                   std::span<const node_pair> pos_pairs,
                                   std::span<const node_pair> neg_pairs) {
  const std::size_t total = pos_pairs.size() + neg_pairs.size();
  if (total == 0) throw std::invalid_argument("loss needs at least one pair");
  const feature_matrix a = project(head, z);
  feature_matrix node_acc(z.rows(), head.hidden());

  bce_gradients out;
  const double inv_total = 1.0 / static_cast<double>(total);
  auto absorb = [&](std::span<const node_pair> pairs, double label) {
    for (const auto& [u, v] : pairs) {
      if (u >= z.rows() || v >= z.rows()) throw std::out_of_range("pair index out of range");
      const double x = dot(a.row(u), a.row(v));
      out.loss += softplus(x) - label * x;
      const double r = (stable_sigmoid(x) - label) * inv_total;
      auto au = a.row(u);
      auto av = a.row(v);
      auto qu = node_acc.row(u);
      auto qv = node_acc.row(v);
      for (std::size_t c = 0; c < head.hidden(); ++c) {
        qu[c] += r * av[c];
        qv[c] += r * au[c];
      }
    }
  };
  absorb(pos_pairs, 1.0);
  absorb(neg_pairs, 0.0);
  out.loss *= inv_total;

  out.grad_theta = feature_matrix(head.hidden(), head.input());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto q = node_acc.row(i);
    auto zi = z.row(i);
    for (std::size_t c = 0; c < head.hidden(); ++c) {
      const double qc = q[c];
      if (qc == 0.0) continue;
      auto grow = out.grad_theta.row(c);
      for (std::size_t j = 0; j < zi.size(); ++j) grow[j] += qc * zi[j];
    }
  }
  if (head.has_bias()) {
    out.grad_bias.assign(head.hidden(), 0.0);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      auto q = node_acc.row(i);
      for (std::size_t c = 0; c < head.hidden(); ++c) out.grad_bias[c] += q[c];
    }
  }
  return out;
}

struct adam_params {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct adam_state {
  std::uint64_t t = 0;
  std::vector<double> m;  // first moments, zero-initialized
  std::vector<double> v;  // second moments, zero-initialized

  explicit adam_state(std::size_t size) : m(size, 0.0), v(size, 0.0) {}
};

// Standard bias-corrected update, elementwise and deterministic.
inline void adam_step(adam_state& state, const adam_params& hp, std::span<double> params,
                      std::span<const double> grad) {
  if (params.size() != state.m.size() || grad.size() != params.size())
    throw std::invalid_argument("adam shapes do not match");
  ++state.t;
  const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * grad[i];
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= hp.lr * m_hat / (std::sqrt(v_hat) + hp.eps);
  }
}

struct train_config {
  double learning_rate = 0.01;
  std::size_t hidden_dim = 64;
  std::size_t max_epochs = 10000;
  std::size_t patience = 250;  // epochs without val improvement before stopping
  bool use_bias = false;
  std::uint64_t seed = 0;
};

struct epoch_record {
  std::size_t epoch = 0;
  double loss = 0.0;
  double val_auc = 0.0;
};

struct train_result {
  linear_head head;  // parameters from the best validation epoch
  std::vector<epoch_record> history;
  double best_val_auc = 0.0;
  std::size_t best_epoch = 0;
};

// Full-batch training: every epoch uses all training positives plus a fresh
// uniform sample of the same number of non-edges (held-out positives are
// never eligible), one Adam step, then validation AUC on the frozen val
// sets. Returns the parameters of the highest-val-AUC epoch, earliest on
// ties; stops after `patience` epochs without improvement.
inline train_result train(const feature_matrix& z, const edge_split& split,
                          const train_config& cfg, const graph& g_train) {
  if (split.train_pos.empty()) throw std::invalid_argument("empty training set");
  if (split.val_pos.empty() || split.val_neg.empty())
    throw std::invalid_argument("empty validation set");
  if (cfg.patience < 1 || cfg.max_epochs < 1)
    throw std::invalid_argument("patience and max_epochs must be >= 1");
  if (z.rows() != g_train.node_count())
    throw std::invalid_argument("feature rows do not match node count");

  std::vector<edge> exclude;
  exclude.reserve(split.val_pos.size() + split.test_pos.size());
  exclude.insert(exclude.end(), split.val_pos.begin(), split.val_pos.end());
  exclude.insert(exclude.end(), split.test_pos.begin(), split.test_pos.end());

  const auto train_pos = as_pairs(split.train_pos);
  const auto val_pos = as_pairs(split.val_pos);
  const auto val_neg = as_pairs(split.val_neg);

  train_result result;
  result.head = random_head(cfg.hidden_dim, z.cols(), cfg.use_bias, derive_seed(cfg.seed, 0));
  auto neg_eng = make_engine(derive_seed(cfg.seed, 1));

  adam_params hp;
  hp.lr = cfg.learning_rate;
  adam_state theta_state(result.head.theta.flat().size());
  adam_state bias_state(result.head.bias.size());

  linear_head best = result.head;
  double best_auc = -1.0;
  std::size_t best_epoch = 0;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto negs = sample_negatives(g_train, split.train_pos.size(), exclude, neg_eng);
    const auto neg_pairs = as_pairs(negs);
    bce_gradients bce = loss_and_grad(result.head, z, train_pos, neg_pairs);
    adam_step(theta_state, hp, result.head.theta.flat(), bce.grad_theta.flat());
    if (result.head.has_bias())
      adam_step(bias_state, hp, result.head.bias, bce.grad_bias);
    const double val_auc = roc_auc(score_pairs(result.head, z, val_pos),
                                   score_pairs(result.head, z, val_neg));
    result.history.push_back({epoch, bce.loss, val_auc});
    if (val_auc > best_auc) {
      best_auc = val_auc;
      best_epoch = epoch;
      best = result.head;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  result.head = std::move(best);
  result.best_val_auc = best_auc;
  result.best_epoch = best_epoch;
  return result;
}

// Text form: dims header then one row per line; optional bias block.
inline void write_linear_head(std::ostream& out, const linear_head& head) {
  out << "theta " << head.hidden() << ' ' << head.input() << '\n';
  for (std::size_t a = 0; a < head.hidden(); ++a) {
    auto row = head.theta.row(a);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << fmt_double(row[j]);
    out << '\n';
  }
  if (head.has_bias()) {
    out << "bias " << head.bias.size() << '\n';
    for (std::size_t a = 0; a < head.bias.size(); ++a)
      out << (a ? " " : "") << fmt_double(head.bias[a]);
    out << '\n';
  }
}

inline void write_history(std::ostream& out, std::span<const epoch_record> history) {
  out << "epoch,loss,val_auc\n";
  for (const epoch_record& rec : history)
    out << rec.epoch << ',' << fmt_double(rec.loss) << ',' << fmt_double(rec.val_auc) << '\n';
}

}  // namespace utlink
