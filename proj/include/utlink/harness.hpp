#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "utlink/eval.hpp"
#include "utlink/features.hpp"
#include "utlink/graph.hpp"
#include "utlink/io.hpp"
#include "utlink/linear.hpp"
#include "utlink/pathmeasures.hpp"
#include "utlink/propagation.hpp"
#include "utlink/rng.hpp"

namespace utlink {

enum class method_family { untrained, simplified, heuristic };

// A scoring method name as accepted by the CLI: propagation variants raw
// (utgcn/utsage/utgin) or with a trained head (sgcn/ssage/sgin), or a
// path-based heuristic.
struct method {
  method_family family = method_family::untrained;
  mp_variant variant = mp_variant::utgcn;  // untrained / simplified
  std::string heuristic;                   // cn|td|tn|aa|ra|katz|rpr|simrank

  std::string name() const {
    switch (family) {
      case method_family::untrained: return to_string(variant);
      case method_family::simplified: return "s" + to_string(variant).substr(2);
      case method_family::heuristic: return heuristic;
    }
    throw std::logic_error("unreachable");
  }
};

inline method method_from_string(const std::string& s) {
  method m;
  if (s == "utgcn" || s == "utsage" || s == "utgin") {
    m.family = method_family::untrained;
    m.variant = variant_from_string(s);
    return m;
  }
  if (s == "sgcn" || s == "ssage" || s == "sgin") {
    m.family = method_family::simplified;
    m.variant = variant_from_string("ut" + s.substr(1));
    return m;
  }
  for (const char* h : {"cn", "td", "tn", "aa", "ra", "katz", "rpr", "simrank"}) {
    if (s == h) {
      m.family = method_family::heuristic;
      m.heuristic = s;
      return m;
    }
  }
  throw std::invalid_argument("unknown method: " + s);
}

// Scores for one heuristic over a pair list on a fixed graph.
inline std::vector<double> heuristic_scores(const graph& g, const std::string& name,
                                            std::span<const node_pair> pairs,
                                            const series_params& series,
                                            bool classical_degree = false) {
  std::vector<double> out;
  out.reserve(pairs.size());
  if (name == "cn" || name == "td" || name == "tn") {
    for (const auto& [u, v] : pairs) {
      triadic t = triadic_measures(g, u, v);
      out.push_back(name == "cn" ? t.t : name == "td" ? t.t_d : t.t_n);
    }
    return out;
  }
  if (name == "aa" || name == "ra") {
    for (const auto& [u, v] : pairs) {
      neighborhood_scores s = neighborhood_heuristics(g, u, v, classical_degree);
      out.push_back(name == "aa" ? s.aa : s.ra);
    }
    return out;
  }
  return truncated_series(g, series_kind_from_string(name), series, pairs);
}

// Runs fn(0..count-1) on up to `jobs` threads; any exception is rethrown on
// the caller once all workers are joined.
inline void parallel_for(std::size_t count, std::size_t jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(jobs, count);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct experiment_config {
  std::string dataset;  // label used in CSV rows
  method m;
  std::size_t layers = 2;
  double epsilon = 0.0;  // utgin self-weight
  std::size_t runs = 10;
  std::uint64_t master_seed = 0;
  double test_frac = 0.10;
  double val_frac = 0.05;
  bool leak_full_graph = false;  // propagate over the full graph (diagnostic only)
  series_params series;          // katz/rpr/simrank knobs
  bool classical_degree = false;
  train_config train;  // simplified-model knobs (seed is derived per run)
  std::size_t jobs = 1;
};

struct run_record {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double auc = 0.0;
};

struct experiment_result {
  std::vector<run_record> runs;
  double mean = 0.0;
  double std_pop = 0.0;     // population std, the reported spread
  double std_sample = 0.0;  // n-1 flavor, recorded alongside
};

inline experiment_result aggregate_runs(std::vector<run_record> runs) {
  experiment_result res;
  res.runs = std::move(runs);
  const auto r = static_cast<double>(res.runs.size());
  for (const run_record& rec : res.runs) res.mean += rec.auc;
  res.mean /= r;
  double ss = 0.0;
  for (const run_record& rec : res.runs) {
    const double d = rec.auc - res.mean;
    ss += d * d;
  }
  res.std_pop = std::sqrt(ss / r);
  res.std_sample = res.runs.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
  return res;
}

// One scored run: split, propagate on the training graph (or the full graph
// under the leak flag), score the frozen test pairs. `captured` receives the
// trained head and history when the method has one.
inline double single_run_auc(const graph& g, const experiment_config& cfg,
                             const feature_matrix& h0, std::uint64_t run_seed,
                             train_result* captured = nullptr) {
  auto [split, g_train] = split_edges(g, cfg.test_frac, cfg.val_frac, derive_seed(run_seed, 0));
  const graph& g_mp = cfg.leak_full_graph ? g : g_train;
  const auto pos_pairs = as_pairs(split.test_pos);
  const auto neg_pairs = as_pairs(split.test_neg);

  std::vector<double> pos, neg;
  switch (cfg.m.family) {
    case method_family::untrained: {
      auto op = propagation_operator::build(g_mp, cfg.m.variant, cfg.epsilon);
      feature_matrix h = propagate(op, h0, cfg.layers);
      pos = inner_product_scores(h, pos_pairs);
      neg = inner_product_scores(h, neg_pairs);
      break;
    }
    case method_family::simplified: {
      auto op = propagation_operator::build(g_mp, cfg.m.variant, cfg.epsilon);
      feature_matrix h = propagate(op, h0, cfg.layers);
      train_config tc = cfg.train;
      tc.seed = derive_seed(run_seed, 1);
      train_result tr = train(h, split, tc, g_mp);
      pos = score_pairs(tr.head, h, pos_pairs);
      neg = score_pairs(tr.head, h, neg_pairs);
      if (captured) *captured = std::move(tr);
      break;
    }
    case method_family::heuristic: {
      pos = heuristic_scores(g_mp, cfg.m.heuristic, pos_pairs, cfg.series, cfg.classical_degree);
      neg = heuristic_scores(g_mp, cfg.m.heuristic, neg_pairs, cfg.series, cfg.classical_degree);
      break;
    }
  }
  return roc_auc(pos, neg);
}

// Repeated runs with per-run derived seeds; run r is reproducible on its own
// from (master_seed, r). `h0` overrides the default one-hot features.
inline experiment_result run_experiment(const graph& g, const experiment_config& cfg,
                                        const feature_matrix* h0 = nullptr) {
  if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
  const feature_matrix features = h0 ? *h0 : one_hot(g.node_count());
  if (features.rows() != g.node_count())
    throw std::invalid_argument("feature rows do not match node count");
  std::vector<run_record> runs(cfg.runs);
  parallel_for(cfg.runs, cfg.jobs, [&](std::size_t r) {
    const std::uint64_t run_seed = derive_seed(cfg.master_seed, r);
    runs[r] = {r, run_seed, single_run_auc(g, cfg, features, run_seed)};
  });
  return aggregate_runs(std::move(runs));
}

// dataset,method,layers,hidden,lr,run,seed,auc rows; hidden/lr are written as
// 0 where the method has no such knob, and three summary rows (mean, std,
// std_sample) close the table with an empty seed field.
inline void write_results_csv(std::ostream& out, const experiment_config& cfg,
                              const experiment_result& res) {
  const bool trained = cfg.m.family == method_family::simplified;
  const bool propagates = cfg.m.family != method_family::heuristic;
  const std::string layers = propagates ? std::to_string(cfg.layers) : "0";
  const std::string hidden = trained ? std::to_string(cfg.train.hidden_dim) : "0";
  const std::string lr = trained ? fmt_double(cfg.train.learning_rate) : "0";
  const std::string prefix =
      cfg.dataset + ',' + cfg.m.name() + ',' + layers + ',' + hidden + ',' + lr + ',';
  out << "dataset,method,layers,hidden,lr,run,seed,auc\n";
  for (const run_record& rec : res.runs)
    out << prefix << rec.run << ',' << rec.seed << ',' << fmt_double(rec.auc) << '\n';
  out << prefix << "mean,," << fmt_double(res.mean) << '\n';
  out << prefix << "std,," << fmt_double(res.std_pop) << '\n';
  out << prefix << "std_sample,," << fmt_double(res.std_sample) << '\n';
}

struct depth_point {
  std::size_t layers = 0;
  double mean = 0.0;
  double std_pop = 0.0;
};

// One experiment per depth with the same master seed, so every depth sees
// identical splits and the comparison is paired.
inline std::vector<depth_point> depth_sweep(const graph& g, experiment_config cfg,
                                            std::vector<std::size_t> depths,
                                            const feature_matrix* h0 = nullptr) {
  if (cfg.m.family != method_family::untrained)
    throw std::invalid_argument("depth sweep applies to untrained methods only");
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  if (depths.empty()) throw std::invalid_argument("empty depth list");
  std::vector<depth_point> out;
  out.reserve(depths.size());
  for (std::size_t d : depths) {
    cfg.layers = d;
    experiment_result res = run_experiment(g, cfg, h0);
    out.push_back({d, res.mean, res.std_pop});
  }
  return out;
}

inline void write_depth_csv(std::ostream& out, std::span<const depth_point> points) {
  out << "layers,mean_auc,std\n";
  for (const depth_point& p : points)
    out << p.layers << ',' << fmt_double(p.mean) << ',' << fmt_double(p.std_pop) << '\n';
}

struct grid_axes {
  std::vector<std::size_t> layers{1, 2, 3};
  std::vector<double> learning_rates{0.2, 0.1, 0.01, 0.001, 0.0001};
  std::vector<std::size_t> hidden_dims{16, 64, 128};
};

struct cv_row {
  std::size_t layers = 0;
  std::size_t hidden = 0;
  double lr = 0.0;
  std::size_t fold = 0;  // 0..2
  double auc = 0.0;
};

struct grid_result {
  std::size_t best_layers = 0;
  std::size_t best_hidden = 0;  // 0 for untrained methods
  double best_lr = 0.0;         // 0 for untrained methods
  double best_mean_auc = 0.0;
  std::vector<cv_row> table;
};

// 3-fold cross-validation for model selection: test positives are split off
// first and never scored; the remaining edges rotate through a held-out
// third with matched negative samples. Untrained methods only sweep the
// layer axis. Ties keep the earliest grid point (layers, then lr, then
// hidden order).
inline grid_result grid_search(const graph& g, const experiment_config& cfg,
                               const grid_axes& axes, const feature_matrix* h0 = nullptr) {
  if (cfg.m.family == method_family::heuristic)
    throw std::invalid_argument("grid search applies to propagation methods only");
  const bool trained = cfg.m.family == method_family::simplified;
  if (axes.layers.empty() || (trained && (axes.learning_rates.empty() || axes.hidden_dims.empty())))
    throw std::invalid_argument("empty grid axis");

  const feature_matrix features = h0 ? *h0 : one_hot(g.node_count());
  auto [base_split, g_no_test] = split_edges(g, cfg.test_frac, cfg.val_frac,
                                             derive_seed(cfg.master_seed, 0x5eed0001ull));

  // CV pool: everything but the test edges, shuffled once into thirds.
  std::vector<edge> pool = base_split.train_pos;
  pool.insert(pool.end(), base_split.val_pos.begin(), base_split.val_pos.end());
  std::sort(pool.begin(), pool.end());
  auto fold_eng = make_engine(derive_seed(cfg.master_seed, 0x5eed0002ull));
  std::shuffle(pool.begin(), pool.end(), fold_eng);
  constexpr std::size_t n_folds = 3;
  if (pool.size() < n_folds) throw std::invalid_argument("too few edges for 3-fold CV");

  struct fold_data {
    edge_split split;
    graph g_fold;
  };
  std::vector<fold_data> folds;
  folds.reserve(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::size_t lo = pool.size() * f / n_folds;
    const std::size_t hi = pool.size() * (f + 1) / n_folds;
    edge_split fs;
    fs.seed = cfg.master_seed;
    fs.val_pos.assign(pool.begin() + static_cast<std::ptrdiff_t>(lo),
                      pool.begin() + static_cast<std::ptrdiff_t>(hi));
    fs.train_pos.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(lo));
    fs.train_pos.insert(fs.train_pos.end(), pool.begin() + static_cast<std::ptrdiff_t>(hi),
                        pool.end());
    fs.test_pos = base_split.test_pos;
    auto neg_eng = make_engine(derive_seed(cfg.master_seed, 0x5eed1000ull + f));
    fs.val_neg = sample_negatives(g, fs.val_pos.size(), {}, neg_eng);
    for (auto* s : {&fs.train_pos, &fs.val_pos, &fs.val_neg}) std::sort(s->begin(), s->end());
    std::vector<edge> held_out = fs.val_pos;
    held_out.insert(held_out.end(), fs.test_pos.begin(), fs.test_pos.end());
    graph g_fold = remove_edges(g, held_out);
    folds.push_back({std::move(fs), std::move(g_fold)});
  }

  struct grid_point {
    std::size_t layers, hidden;
    double lr;
  };
  std::vector<grid_point> points;
  for (std::size_t l : axes.layers) {
    if (!trained) {
      points.push_back({l, 0, 0.0});
      continue;
    }
    for (double lr : axes.learning_rates)
      for (std::size_t h : axes.hidden_dims) points.push_back({l, h, lr});
  }

  std::vector<std::vector<double>> fold_aucs(points.size(),
                                             std::vector<double>(n_folds, 0.0));
  parallel_for(points.size() * n_folds, cfg.jobs, [&](std::size_t idx) {
    const std::size_t pi = idx / n_folds;
    const std::size_t f = idx % n_folds;
    const grid_point& pt = points[pi];
    const fold_data& fd = folds[f];
    const graph& g_mp = cfg.leak_full_graph ? g : fd.g_fold;
    auto op = propagation_operator::build(g_mp, cfg.m.variant, cfg.epsilon);
    feature_matrix h = propagate(op, features, pt.layers);
    double auc;
    if (trained) {
      train_config tc = cfg.train;
      tc.hidden_dim = pt.hidden;
      tc.learning_rate = pt.lr;
      tc.seed = derive_seed(cfg.master_seed, 0x5eed2000ull + idx);
      train_result tr = train(h, fd.split, tc, g_mp);
      auc = tr.best_val_auc;
    } else {
      auto pos = inner_product_scores(h, as_pairs(fd.split.val_pos));
      auto neg = inner_product_scores(h, as_pairs(fd.split.val_neg));
      auc = roc_auc(pos, neg);
    }
    fold_aucs[pi][f] = auc;
  });

  grid_result res;
  double best = -1.0;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    double mean = 0.0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      res.table.push_back({points[pi].layers, points[pi].hidden, points[pi].lr, f,
                           fold_aucs[pi][f]});
      mean += fold_aucs[pi][f];
    }
    mean /= static_cast<double>(n_folds);
    if (mean > best) {
      best = mean;
      res.best_layers = points[pi].layers;
      res.best_hidden = points[pi].hidden;
      res.best_lr = points[pi].lr;
      res.best_mean_auc = mean;
    }
  }
  return res;
}

inline void write_cv_csv(std::ostream& out, const grid_result& res) {
  out << "layers,hidden,lr,fold,auc\n";
  for (const cv_row& row : res.table)
    out << row.layers << ',' << row.hidden << ',' << fmt_double(row.lr) << ',' << row.fold << ','
        << fmt_double(row.auc) << '\n';
}

}  // namespace utlink
