// Command-line front end: graph inspection, feature propagation, pair
// scoring, identity verification, orthogonality diagnostics, evaluation
// runs, grid search, and depth sweeps. Every artifact is written atomically
// with a JSON metadata record beside it, and every seeded invocation is
// bit-reproducible.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "utlink/utlink.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_verification = 3;

using nlohmann::json;

struct loaded_graph {
  utlink::graph g;
  utlink::parse_stats stats;
  std::string path;
};

loaded_graph load_graph(const std::string& path) {
  std::istringstream in(utlink::read_file(path));
  loaded_graph lg;
  lg.path = path;
  lg.g = utlink::parse_edge_list(in, &lg.stats);
  return lg;
}

struct pair_list {
  std::vector<utlink::node_pair> pairs;
  std::vector<std::pair<std::string, std::string>> tokens;  // as written in the file
};

pair_list load_pairs(const std::string& path, const utlink::graph& g) {
  std::istringstream in(utlink::read_file(path));
  pair_list out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    if (a.front() == '#') continue;
    if (!(ls >> b) || (ls >> extra))
      throw utlink::parse_error("pair list line " + std::to_string(line_no) +
                                ": expected two node tokens");
    out.pairs.emplace_back(g.id_of(a), g.id_of(b));
    out.tokens.emplace_back(a, b);
  }
  if (out.pairs.empty()) throw utlink::parse_error("empty pair list");
  return out;
}

// One-hot unless a feature file is given; file features get the requested
// row normalization.
utlink::feature_matrix make_h0(const utlink::graph& g, const std::string& features_path,
                               const std::string& normalize) {
  if (features_path.empty()) return utlink::one_hot(g.node_count());
  auto f = utlink::load_features_file(features_path, g);
  return utlink::normalize_rows(f, utlink::norm_scheme_from_string(normalize));
}

std::size_t resolve_jobs(std::size_t flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("UTLINK_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    std::cerr << "warning: ignoring invalid UTLINK_JOBS value '" << env << "'\n";
  }
  return 1;
}

void write_meta(const std::string& artifact_path, json meta) {
  meta["tool"] = "utlink";
  meta["version"] = utlink::version;
  utlink::atomic_write(artifact_path + ".meta.json", meta.dump() + "\n");
}

json graph_meta(const loaded_graph& lg) {
  return json{{"path", lg.path},
              {"nodes", lg.g.node_count()},
              {"edges", lg.g.edge_count()},
              {"duplicates_dropped", lg.stats.duplicates},
              {"self_loops_dropped", lg.stats.self_loops}};
}

double pick_gamma(double flag_value, const std::string& method) {
  if (flag_value >= 0.0) return flag_value;
  return method == "rpr" ? 0.85 : 0.5;
}

std::string default_dataset_name(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Shared validator: gamma strictly inside (0, 1).
std::string check_open_unit(const std::string& s) {
  try {
    const double v = std::stod(s);
    if (v > 0.0 && v < 1.0) return {};
  } catch (const std::exception&) {
  }
  return "value must lie strictly between 0 and 1";
}

int cmd_info(const std::string& edges_path) {
  loaded_graph lg = load_graph(edges_path);
  const auto& g = lg.g;
  std::size_t dmin = g.node_count() ? g.degree(0) : 0, dmax = 0, isolated = 0;
  for (utlink::node_id v = 0; v < g.node_count(); ++v) {
    dmin = std::min(dmin, g.degree(v));
    dmax = std::max(dmax, g.degree(v));
    if (g.degree(v) == 0) ++isolated;
  }
  const double dmean =
      g.node_count() ? 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count())
                     : 0.0;
  std::cout << "nodes: " << g.node_count() << '\n'
            << "edges: " << g.edge_count() << '\n'
            << "degree min/mean/max: " << dmin << ' ' << utlink::fmt_double(dmean) << ' ' << dmax
            << '\n'
            << "isolated nodes: " << isolated << '\n'
            << "duplicate lines dropped: " << lg.stats.duplicates << '\n'
            << "self-loops dropped: " << lg.stats.self_loops << '\n';
  return exit_ok;
}

int cmd_propagate(const std::string& edges_path, const std::string& variant, std::size_t layers,
                  double epsilon, const std::string& features_path, const std::string& normalize,
                  const std::string& out) {
  loaded_graph lg = load_graph(edges_path);
  auto h0 = make_h0(lg.g, features_path, normalize);
  auto op = utlink::propagation_operator::build(lg.g, utlink::variant_from_string(variant), epsilon);
  auto h = utlink::propagate(op, h0, layers);
  std::ostringstream body;
  utlink::write_features(body, lg.g, h);
  utlink::atomic_write(out, body.str());
  write_meta(out, json{{"subcommand", "propagate"},
                       {"input", graph_meta(lg)},
                       {"variant", variant},
                       {"layers", layers},
                       {"epsilon", epsilon},
                       {"features", features_path},
                       {"normalize", features_path.empty() ? "" : normalize},
                       {"output", out}});
  return exit_ok;
}

int cmd_score(const std::string& edges_path, const std::string& method_name,
              const std::string& pairs_path, std::size_t layers, double epsilon, double gamma_flag,
              std::size_t max_len, bool classical_degree, const std::string& features_path,
              const std::string& normalize, const std::string& out) {
  loaded_graph lg = load_graph(edges_path);
  pair_list pl = load_pairs(pairs_path, lg.g);
  const utlink::method m = utlink::method_from_string(method_name);
  utlink::series_params series{pick_gamma(gamma_flag, method_name), max_len};

  std::vector<double> scores;
  if (m.family == utlink::method_family::untrained) {
    auto h0 = make_h0(lg.g, features_path, normalize);
    auto op = utlink::propagation_operator::build(lg.g, m.variant, epsilon);
    auto h = utlink::propagate(op, h0, layers);
    scores = utlink::inner_product_scores(h, pl.pairs);
  } else {
    scores = utlink::heuristic_scores(lg.g, m.heuristic, pl.pairs, series, classical_degree);
  }

  std::ostringstream body;
  for (std::size_t i = 0; i < scores.size(); ++i)
    body << pl.tokens[i].first << ' ' << pl.tokens[i].second << ' '
         << utlink::fmt_double(scores[i]) << '\n';
  utlink::atomic_write(out, body.str());
  write_meta(out, json{{"subcommand", "score"},
                       {"input", graph_meta(lg)},
                       {"method", method_name},
                       {"pairs", pairs_path},
                       {"pair_count", pl.pairs.size()},
                       {"layers", layers},
                       {"epsilon", epsilon},
                       {"gamma", series.gamma},
                       {"max_len", series.max_len},
                       {"classical_degree", classical_degree},
                       {"features", features_path},
                       {"output", out}});
  return exit_ok;
}

int cmd_verify(const utlink::verify_options& opt, const std::string& out) {
  const utlink::verify_summary sum = utlink::run_identity_suite(opt);
  std::cout << "graphs: " << sum.graphs_checked << '\n'
            << "identities: " << sum.identities_checked << '\n'
            << "failures: " << sum.failures_total << '\n';
  constexpr std::size_t show = 20;
  for (std::size_t i = 0; i < sum.failures.size() && i < show; ++i)
    std::cerr << "FAIL " << utlink::describe(sum.failures[i]) << '\n';
  if (sum.failures_total > show)
    std::cerr << "... " << (sum.failures_total - show) << " more failures\n";
  if (!out.empty()) {
    std::ostringstream body;
    utlink::write_verify_csv(body, sum);
    utlink::atomic_write(out, body.str());
    write_meta(out, json{{"subcommand", "verify"},
                         {"graphs", opt.graphs},
                         {"min_n", opt.min_n},
                         {"max_n", opt.max_n},
                         {"edge_prob", opt.edge_prob},
                         {"max_layers", opt.max_layers},
                         {"seed", opt.seed},
                         {"perturbation", opt.perturbation},
                         {"identities", sum.identities_checked},
                         {"failures", sum.failures_total},
                         {"output", out}});
  }
  return sum.ok() ? exit_ok : exit_verification;
}

int cmd_ortho(const std::string& edges_path, const std::string& features_path,
              const std::string& kind, std::size_t dim, double density,
              const std::string& normalize, std::size_t samples, std::uint64_t seed, bool cosine,
              std::size_t bins, const std::string& out) {
  loaded_graph lg = load_graph(edges_path);
  utlink::feature_matrix f;
  if (!features_path.empty()) {
    f = utlink::normalize_rows(utlink::load_features_file(features_path, lg.g),
                               utlink::norm_scheme_from_string(normalize));
  } else {
    const auto fk = kind == "gaussian" ? utlink::feature_kind::gaussian
                                       : utlink::feature_kind::sparse_binary;
    f = utlink::random_features(lg.g.node_count(), dim, fk, density,
                                utlink::derive_seed(seed, 0xfea7));
    if (normalize != "none")
      f = utlink::normalize_rows(f, utlink::norm_scheme_from_string(normalize));
  }
  const auto rep = utlink::orthogonality_report(lg.g, f, samples, seed, cosine);
  if (rep.connected_empty)
    std::cerr << "warning: graph has no edges; connected-pair distribution is empty\n";
  std::cout << "mean |" << (cosine ? "cosine" : "inner product")
            << "|: connected=" << utlink::fmt_double(utlink::mean_abs(rep.connected))
            << " random=" << utlink::fmt_double(utlink::mean_abs(rep.random)) << '\n';
  std::ostringstream body;
  utlink::write_ortho_histogram(body, rep, bins);
  utlink::atomic_write(out, body.str());
  write_meta(out, json{{"subcommand", "ortho"},
                       {"input", graph_meta(lg)},
                       {"features", features_path},
                       {"kind", features_path.empty() ? kind : ""},
                       {"dim", dim},
                       {"density", density},
                       {"normalize", normalize},
                       {"samples", samples},
                       {"seed", seed},
                       {"cosine", cosine},
                       {"bins", bins},
                       {"connected_empty", rep.connected_empty},
                       {"output", out}});
  return exit_ok;
}

json config_meta(const utlink::experiment_config& cfg) {
  return json{{"dataset", cfg.dataset},
              {"method", cfg.m.name()},
              {"layers", cfg.layers},
              {"epsilon", cfg.epsilon},
              {"runs", cfg.runs},
              {"master_seed", cfg.master_seed},
              {"test_frac", cfg.test_frac},
              {"val_frac", cfg.val_frac},
              {"leak_full_graph", cfg.leak_full_graph},
              {"gamma", cfg.series.gamma},
              {"max_len", cfg.series.max_len},
              {"classical_degree", cfg.classical_degree},
              {"hidden", cfg.train.hidden_dim},
              {"learning_rate", cfg.train.learning_rate},
              {"max_epochs", cfg.train.max_epochs},
              {"patience", cfg.train.patience},
              {"bias", cfg.train.use_bias},
              {"jobs", cfg.jobs}};
}

int cmd_eval(const loaded_graph& lg, const utlink::experiment_config& cfg,
             const std::string& features_path, const std::string& normalize,
             const std::string& out, const std::string& head_out, const std::string& history_out) {
  auto h0 = make_h0(lg.g, features_path, normalize);
  const auto res = utlink::run_experiment(lg.g, cfg, &h0);
  std::cout << "mean=" << utlink::fmt_double(res.mean) << ", std=" << utlink::fmt_double(res.std_pop)
            << '\n';
  std::ostringstream body;
  utlink::write_results_csv(body, cfg, res);
  utlink::atomic_write(out, body.str());
  json meta{{"subcommand", "eval"},
            {"input", graph_meta(lg)},
            {"config", config_meta(cfg)},
            {"features", features_path},
            {"mean", res.mean},
            {"std", res.std_pop},
            {"output", out}};

  if (!head_out.empty() || !history_out.empty()) {
    utlink::train_result captured;
    utlink::single_run_auc(lg.g, cfg, h0, utlink::derive_seed(cfg.master_seed, 0), &captured);
    if (!head_out.empty()) {
      std::ostringstream hb;
      utlink::write_linear_head(hb, captured.head);
      utlink::atomic_write(head_out, hb.str());
      meta["head_output"] = head_out;
    }
    if (!history_out.empty()) {
      std::ostringstream hb;
      utlink::write_history(hb, captured.history);
      utlink::atomic_write(history_out, hb.str());
      meta["history_output"] = history_out;
    }
  }
  write_meta(out, meta);
  return exit_ok;
}

int cmd_sweep(const loaded_graph& lg, const utlink::experiment_config& cfg,
              const utlink::grid_axes& axes, const std::string& features_path,
              const std::string& normalize, const std::string& out) {
  auto h0 = make_h0(lg.g, features_path, normalize);
  if (cfg.m.family == utlink::method_family::untrained)
    std::cerr << "notice: untrained method, learning-rate and hidden axes do not apply\n";
  const auto res = utlink::grid_search(lg.g, cfg, axes, &h0);
  std::cout << "best: layers=" << res.best_layers << " hidden=" << res.best_hidden
            << " lr=" << utlink::fmt_double(res.best_lr)
            << " mean_auc=" << utlink::fmt_double(res.best_mean_auc) << '\n';
  std::ostringstream body;
  utlink::write_cv_csv(body, res);
  utlink::atomic_write(out, body.str());
  write_meta(out, json{{"subcommand", "sweep"},
                       {"input", graph_meta(lg)},
                       {"config", config_meta(cfg)},
                       {"grid_layers", axes.layers},
                       {"grid_lr", axes.learning_rates},
                       {"grid_hidden", axes.hidden_dims},
                       {"best_layers", res.best_layers},
                       {"best_hidden", res.best_hidden},
                       {"best_lr", res.best_lr},
                       {"best_mean_auc", res.best_mean_auc},
                       {"output", out}});
  return exit_ok;
}

int cmd_depth_sweep(const loaded_graph& lg, const utlink::experiment_config& cfg,
                    const std::vector<std::size_t>& depths, const std::string& features_path,
                    const std::string& normalize, const std::string& out) {
  const std::set<std::size_t> unique(depths.begin(), depths.end());
  if (unique.size() != depths.size())
    std::cerr << "notice: duplicate depths in list, deduplicated\n";
  auto h0 = make_h0(lg.g, features_path, normalize);
  const auto points = utlink::depth_sweep(lg.g, cfg, depths, &h0);
  for (const auto& p : points)
    std::cout << "layers=" << p.layers << " mean=" << utlink::fmt_double(p.mean)
              << " std=" << utlink::fmt_double(p.std_pop) << '\n';
  std::ostringstream body;
  utlink::write_depth_csv(body, points);
  utlink::atomic_write(out, body.str());
  write_meta(out, json{{"subcommand", "depth-sweep"},
                       {"input", graph_meta(lg)},
                       {"config", config_meta(cfg)},
                       {"depths", std::vector<std::size_t>(unique.begin(), unique.end())},
                       {"output", out}});
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"untrained message-passing link prediction toolkit"};
  app.require_subcommand(1);
  int rc = exit_ok;

  const std::vector<std::string> variant_names{"utgcn", "utsage", "utgin"};
  const std::vector<std::string> score_methods{"utgcn", "utsage", "utgin", "cn", "td", "tn",
                                               "aa", "ra", "katz", "rpr", "simrank"};
  const std::vector<std::string> eval_methods{"utgcn", "utsage", "utgin", "sgcn", "ssage",
                                              "sgin", "cn", "td", "tn", "aa",
                                              "ra", "katz", "rpr", "simrank"};
  const std::vector<std::string> sweep_methods{"utgcn", "utsage", "utgin",
                                               "sgcn", "ssage", "sgin"};
  const std::vector<std::string> norm_names{"none", "l1", "l2"};

  // info
  std::string info_edges;
  auto* info = app.add_subcommand("info", "print node/edge/degree statistics of an edge list");
  info->add_option("edges", info_edges, "edge list file")->required();
  info->callback([&] { rc = cmd_info(info_edges); });

  // propagate
  struct {
    std::string edges, variant, features, normalize = "l1", out;
    std::size_t layers = 1;
    double epsilon = 0.0;
  } prop;
  auto* propagate = app.add_subcommand("propagate", "write propagated node features");
  propagate->add_option("edges", prop.edges, "edge list file")->required();
  propagate->add_option("--variant", prop.variant, "propagation operator")
      ->required()
      ->check(CLI::IsMember(variant_names));
  propagate->add_option("--layers", prop.layers, "number of propagation steps");
  propagate->add_option("--epsilon", prop.epsilon, "utgin self-loop weight offset");
  propagate->add_option("--features", prop.features, "initial feature file (default: one-hot)");
  propagate->add_option("--normalize", prop.normalize, "row normalization for file features")
      ->check(CLI::IsMember(norm_names));
  propagate->add_option("--out", prop.out, "output feature file")->required();
  propagate->callback([&] {
    rc = cmd_propagate(prop.edges, prop.variant, prop.layers, prop.epsilon, prop.features,
                       prop.normalize, prop.out);
  });

  // score
  struct {
    std::string edges, method, pairs, features, normalize = "l1", out;
    std::size_t layers = 1, max_len = 10;
    double epsilon = 0.0, gamma = -1.0;
    bool classical_degree = false;
  } sc;
  auto* score = app.add_subcommand("score", "score node pairs with one method");
  score->add_option("edges", sc.edges, "edge list file")->required();
  score->add_option("--method", sc.method, "scoring method")
      ->required()
      ->check(CLI::IsMember(score_methods));
  score->add_option("--pairs", sc.pairs, "pair list file, two tokens per line")->required();
  score->add_option("--layers", sc.layers, "propagation steps for ut methods");
  score->add_option("--epsilon", sc.epsilon, "utgin self-loop weight offset");
  score->add_option("--gamma", sc.gamma, "series damping (default 0.5; rpr 0.85)")
      ->check(CLI::Validator(check_open_unit, "OPEN_UNIT"));
  score->add_option("--max-len", sc.max_len, "series truncation length");
  score->add_flag("--classical-degree", sc.classical_degree,
                  "aa/ra use the plain degree instead of degree+1");
  score->add_option("--features", sc.features, "initial feature file (default: one-hot)");
  score->add_option("--normalize", sc.normalize, "row normalization for file features")
      ->check(CLI::IsMember(norm_names));
  score->add_option("--out", sc.out, "output score file")->required();
  score->callback([&] {
    rc = cmd_score(sc.edges, sc.method, sc.pairs, sc.layers, sc.epsilon, sc.gamma, sc.max_len,
                   sc.classical_degree, sc.features, sc.normalize, sc.out);
  });

  // verify
  utlink::verify_options vopt;
  std::string verify_out;
  auto* verify = app.add_subcommand(
      "verify", "check the propagation identities on a seeded random-graph corpus");
  verify->add_option("--graphs", vopt.graphs, "number of random graphs");
  verify->add_option("--min-n", vopt.min_n, "smallest node count");
  verify->add_option("--max-n", vopt.max_n, "largest node count");
  verify->add_option("--edge-prob", vopt.edge_prob, "edge probability")
      ->check(CLI::Range(0.0, 1.0));
  verify->add_option("--layers", vopt.max_layers, "check depths 1..layers");
  verify->add_option("--seed", vopt.seed, "corpus seed");
  verify->add_option("--perturb", vopt.perturbation,
                     "relative operator-weight distortion (negative control)");
  verify->add_option("--budget", vopt.budget, "enumeration budget per source");
  verify->add_option("--out", verify_out, "per-graph results CSV");
  verify->callback([&] { rc = cmd_verify(vopt, verify_out); });

  // ortho
  struct {
    std::string edges, features, kind = "gaussian", normalize = "none", out;
    std::size_t dim = 128, samples = 200, bins = 20;
    double density = 0.1;
    std::uint64_t seed = 0;
    bool cosine = false;
  } ort;
  auto* ortho = app.add_subcommand("ortho", "pair-similarity histogram of node features");
  ortho->add_option("edges", ort.edges, "edge list file")->required();
  ortho->add_option("--features", ort.features, "feature file (default: generated)");
  const std::vector<std::string> kind_names{"gaussian", "sparse-binary"};
  ortho->add_option("--kind", ort.kind, "generated feature kind")
      ->check(CLI::IsMember(kind_names));
  ortho->add_option("--dim", ort.dim, "generated feature dimension");
  ortho->add_option("--density", ort.density, "sparse-binary one-probability")
      ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0));
  ortho->add_option("--normalize", ort.normalize, "row normalization")
      ->check(CLI::IsMember(norm_names));
  ortho->add_option("--samples", ort.samples, "pairs per distribution");
  ortho->add_option("--seed", ort.seed, "sampling seed");
  ortho->add_flag("--cosine", ort.cosine, "histogram cosines instead of inner products");
  ortho->add_option("--bins", ort.bins, "histogram bins");
  ortho->add_option("--out", ort.out, "histogram CSV")->required();
  ortho->callback([&] {
    rc = cmd_ortho(ort.edges, ort.features, ort.kind, ort.dim, ort.density, ort.normalize,
                   ort.samples, ort.seed, ort.cosine, ort.bins, ort.out);
  });

  // shared eval-style options
  struct eval_opts {
    std::string edges, method, dataset, features, normalize = "l1", out;
    std::size_t layers = 2, hidden = 64, max_epochs = 10000, patience = 250, max_len = 10;
    std::size_t runs = 10, jobs = 0;
    double epsilon = 0.0, lr = 0.01, gamma = -1.0, test_frac = 0.10, val_frac = 0.05;
    std::uint64_t seed = 0;
    bool leak = false, bias = false, classical_degree = false;
  };
  auto add_eval_options = [&](CLI::App* cmd, eval_opts& o, const std::vector<std::string>& methods,
                              bool with_layers) {
    cmd->add_option("edges", o.edges, "edge list file")->required();
    cmd->add_option("--method", o.method, "scoring method")
        ->required()
        ->check(CLI::IsMember(methods));
    cmd->add_option("--dataset-name", o.dataset, "label for CSV rows (default: file stem)");
    if (with_layers) cmd->add_option("--layers", o.layers, "propagation steps");
    cmd->add_option("--epsilon", o.epsilon, "utgin self-loop weight offset");
    cmd->add_option("--hidden", o.hidden, "trained-head hidden width");
    cmd->add_option("--lr", o.lr, "trained-head learning rate");
    cmd->add_option("--max-epochs", o.max_epochs, "training epoch cap");
    cmd->add_option("--patience", o.patience, "epochs without val improvement before stop");
    cmd->add_flag("--bias", o.bias, "trained head carries a bias term");
    cmd->add_option("--runs", o.runs, "independent runs");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--test-frac", o.test_frac, "test edge fraction");
    cmd->add_option("--val-frac", o.val_frac, "validation edge fraction");
    cmd->add_flag("--leak-full-graph", o.leak,
                  "propagate over the full graph including held-out edges (diagnostic)");
    cmd->add_option("--gamma", o.gamma, "series damping (default 0.5; rpr 0.85)")
        ->check(CLI::Validator(check_open_unit, "OPEN_UNIT"));
    cmd->add_option("--max-len", o.max_len, "series truncation length");
    cmd->add_flag("--classical-degree", o.classical_degree,
                  "aa/ra use the plain degree instead of degree+1");
    cmd->add_option("--features", o.features, "initial feature file (default: one-hot)");
    cmd->add_option("--normalize", o.normalize, "row normalization for file features")
        ->check(CLI::IsMember(norm_names));
    cmd->add_option("--jobs", o.jobs, "worker threads (default: UTLINK_JOBS or 1)");
    cmd->add_option("--out", o.out, "output CSV")->required();
  };
  auto to_config = [&](const eval_opts& o) {
    utlink::experiment_config cfg;
    cfg.dataset = o.dataset.empty() ? default_dataset_name(o.edges) : o.dataset;
    cfg.m = utlink::method_from_string(o.method);
    cfg.layers = o.layers;
    cfg.epsilon = o.epsilon;
    cfg.runs = o.runs;
    cfg.master_seed = o.seed;
    cfg.test_frac = o.test_frac;
    cfg.val_frac = o.val_frac;
    cfg.leak_full_graph = o.leak;
    cfg.series = {pick_gamma(o.gamma, o.method), o.max_len};
    cfg.classical_degree = o.classical_degree;
    cfg.train.hidden_dim = o.hidden;
    cfg.train.learning_rate = o.lr;
    cfg.train.max_epochs = o.max_epochs;
    cfg.train.patience = o.patience;
    cfg.train.use_bias = o.bias;
    cfg.jobs = resolve_jobs(o.jobs);
    return cfg;
  };

  // eval
  eval_opts ev;
  std::string ev_head_out, ev_history_out;
  auto* eval = app.add_subcommand("eval", "multi-run test-AUC experiment with a results CSV");
  add_eval_options(eval, ev, eval_methods, true);
  eval->add_option("--head-out", ev_head_out, "write the run-0 trained head (s-methods)");
  eval->add_option("--history-out", ev_history_out, "write the run-0 training history CSV");
  eval->callback([&] {
    if ((!ev_head_out.empty() || !ev_history_out.empty()) &&
        utlink::method_from_string(ev.method).family != utlink::method_family::simplified)
      throw CLI::ValidationError("--head-out/--history-out apply to trained methods only");
    rc = cmd_eval(load_graph(ev.edges), to_config(ev), ev.features, ev.normalize, ev.out,
                  ev_head_out, ev_history_out);
  });

  // sweep
  eval_opts sw;
  utlink::grid_axes axes;
  auto* sweep = app.add_subcommand("sweep", "3-fold cross-validated hyperparameter grid search");
  add_eval_options(sweep, sw, sweep_methods, false);
  sweep->add_option("--grid-layers", axes.layers, "layer-count axis")->delimiter(',');
  sweep->add_option("--grid-lr", axes.learning_rates, "learning-rate axis")->delimiter(',');
  sweep->add_option("--grid-hidden", axes.hidden_dims, "hidden-width axis")->delimiter(',');
  sweep->callback(
      [&] { rc = cmd_sweep(load_graph(sw.edges), to_config(sw), axes, sw.features, sw.normalize,
                           sw.out); });

  // depth-sweep
  eval_opts ds;
  std::vector<std::size_t> depths;
  auto* depth =
      app.add_subcommand("depth-sweep", "paired-split AUC across propagation depths (ut methods)");
  add_eval_options(depth, ds, variant_names, false);
  depth->add_option("--depths", depths, "comma-separated depth list")->required()->delimiter(',');
  depth->callback([&] {
    rc = cmd_depth_sweep(load_graph(ds.edges), to_config(ds), depths, ds.features, ds.normalize,
                         ds.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  } catch (const utlink::parse_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return exit_data;
  } catch (const utlink::io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return exit_data;
  } catch (const utlink::oracle_budget_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::out_of_range& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return exit_data;
  }
  return rc;
}
