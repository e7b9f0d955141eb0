#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <sstream>

#include "utlink/harness.hpp"

using namespace utlink;
using Catch::Matchers::WithinAbs;

namespace {

graph test_graph(std::uint64_t seed = 17) { return erdos_renyi(40, 0.2, seed); }

experiment_config small_config(const std::string& method_name) {
  experiment_config cfg;
  cfg.dataset = "unit";
  cfg.m = method_from_string(method_name);
  cfg.layers = 2;
  cfg.runs = 3;
  cfg.master_seed = 5;
  cfg.train.hidden_dim = 4;
  cfg.train.max_epochs = 30;
  cfg.train.patience = 30;
  return cfg;
}

}  // namespace

TEST_CASE("method names round trip through parsing") {
  for (const char* name : {"utgcn", "utsage", "utgin", "sgcn", "ssage", "sgin", "cn", "td",
                           "tn", "aa", "ra", "katz", "rpr", "simrank"})
    CHECK(method_from_string(name).name() == name);
  CHECK(method_from_string("sgcn").family == method_family::simplified);
  CHECK(method_from_string("sgcn").variant == mp_variant::utgcn);
  CHECK(method_from_string("utgin").family == method_family::untrained);
  CHECK(method_from_string("ra").family == method_family::heuristic);
  CHECK_THROWS_AS(method_from_string("gcn"), std::invalid_argument);
  CHECK_THROWS_AS(method_from_string(""), std::invalid_argument);
}

TEST_CASE("heuristic scores dispatch to the underlying measures") {
  const graph g = test_graph();
  std::vector<node_pair> pairs{{0, 5}, {3, 9}, {12, 30}};
  const series_params series{0.5, 4};
  for (const auto& [u, v] : pairs) {
    const std::vector<node_pair> one{{u, v}};
    const triadic t = triadic_measures(g, u, v);
    CHECK(heuristic_scores(g, "cn", one, series)[0] == t.t);
    CHECK(heuristic_scores(g, "td", one, series)[0] == t.t_d);
    CHECK(heuristic_scores(g, "tn", one, series)[0] == t.t_n);
    const neighborhood_scores ns = neighborhood_heuristics(g, u, v);
    CHECK(heuristic_scores(g, "aa", one, series)[0] == ns.aa);
    CHECK(heuristic_scores(g, "ra", one, series)[0] == ns.ra);
  }
  const auto katz = truncated_series(g, series_kind::katz, series, pairs);
  CHECK(heuristic_scores(g, "katz", pairs, series) == katz);
  CHECK_THROWS_AS(heuristic_scores(g, "nope", pairs, series), std::invalid_argument);
}

TEST_CASE("parallel_for covers the range once whatever the thread count") {
  for (std::size_t jobs : {1u, 2u, 5u, 16u}) {
    std::vector<int> hits(100, 0);
    std::atomic<int> total{0};
    parallel_for(100, jobs, [&](std::size_t i) {
      ++hits[i];
      total.fetch_add(static_cast<int>(i));
    });
    for (int h : hits) CHECK(h == 1);
    CHECK(total.load() == 4950);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("must not be called"); });
}

TEST_CASE("parallel_for propagates the first worker exception") {
  CHECK_THROWS_AS(parallel_for(32, 4,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("aggregation reproduces hand-computed moments") {
  std::vector<run_record> runs{{0, 0, 0.8}, {1, 0, 0.9}, {2, 0, 1.0}};
  const auto res = aggregate_runs(std::move(runs));
  CHECK_THAT(res.mean, WithinAbs(0.9, 1e-15));
  const double var = (0.01 + 0.0 + 0.01) / 3.0;
  CHECK_THAT(res.std_pop, WithinAbs(std::sqrt(var), 1e-15));
  CHECK_THAT(res.std_sample, WithinAbs(std::sqrt(0.02 / 2.0), 1e-15));

  const auto one = aggregate_runs({{0, 0, 0.7}});
  CHECK(one.mean == 0.7);
  CHECK(one.std_pop == 0.0);
  CHECK(one.std_sample == 0.0);
}

TEST_CASE("experiments are deterministic in the master seed") {
  const graph g = test_graph();
  for (const char* name : {"utsage", "aa"}) {
    const auto cfg = small_config(name);
    const auto a = run_experiment(g, cfg);
    const auto b = run_experiment(g, cfg);
    REQUIRE(a.runs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.runs[i].auc == b.runs[i].auc);
      CHECK(a.runs[i].seed == b.runs[i].seed);
    }
    auto cfg2 = cfg;
    cfg2.master_seed = 6;
    const auto c = run_experiment(g, cfg2);
    CHECK(a.runs[0].seed != c.runs[0].seed);
  }
}

TEST_CASE("thread count does not change the results") {
  const graph g = test_graph();
  auto cfg = small_config("utgcn");
  cfg.runs = 4;
  const auto serial = run_experiment(g, cfg);
  cfg.jobs = 4;
  const auto parallel = run_experiment(g, cfg);
  REQUIRE(serial.runs.size() == parallel.runs.size());
  for (std::size_t i = 0; i < serial.runs.size(); ++i)
    CHECK(serial.runs[i].auc == parallel.runs[i].auc);
}

TEST_CASE("trained methods run end to end and expose the captured run") {
  const graph g = test_graph();
  const auto cfg = small_config("sgcn");
  const auto h0 = one_hot(g.node_count());
  train_result captured;
  const double auc =
      single_run_auc(g, cfg, h0, derive_seed(cfg.master_seed, 0), &captured);
  CHECK(auc >= 0.0);
  CHECK(auc <= 1.0);
  CHECK(captured.head.hidden() == 4);
  CHECK(captured.head.input() == g.node_count());
  CHECK_FALSE(captured.history.empty());
  CHECK(captured.best_epoch >= 1);
}

TEST_CASE("custom initial features flow through the experiment") {
  const graph g = test_graph();
  const auto cfg = small_config("utgcn");
  const auto dense = random_features(g.node_count(), 8, feature_kind::gaussian, 0.0, 3);
  const auto a = run_experiment(g, cfg, &dense);
  const auto b = run_experiment(g, cfg, &dense);
  CHECK(a.runs[0].auc == b.runs[0].auc);
  const auto onehot = run_experiment(g, cfg);
  CHECK(a.runs[0].auc != onehot.runs[0].auc);

  const auto wrong = random_features(g.node_count() + 1, 8, feature_kind::gaussian, 0.0, 3);
  CHECK_THROWS_AS(run_experiment(g, cfg, &wrong), std::invalid_argument);
  auto bad = cfg;
  bad.runs = 0;
  CHECK_THROWS_AS(run_experiment(g, bad), std::invalid_argument);
}

TEST_CASE("results CSV carries the configuration and the three summary rows") {
  const graph g = test_graph();

  SECTION("untrained") {
    const auto cfg = small_config("utgin");
    const auto res = run_experiment(g, cfg);
    std::ostringstream out;
    write_results_csv(out, cfg, res);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "dataset,method,layers,hidden,lr,run,seed,auc");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3 + 3);
    CHECK(rows[0].rfind("unit,utgin,2,0,0,0,", 0) == 0);
    CHECK(rows[3].rfind("unit,utgin,2,0,0,mean,,", 0) == 0);
    CHECK(rows[4].rfind("unit,utgin,2,0,0,std,,", 0) == 0);
    CHECK(rows[5].rfind("unit,utgin,2,0,0,std_sample,,", 0) == 0);
  }

  SECTION("trained knobs and heuristic placeholders") {
    auto cfg = small_config("sgin");
    cfg.train.learning_rate = 0.1;
    experiment_result res;
    res.runs = {{0, 42, 0.75}};
    res.mean = 0.75;
    std::ostringstream out;
    write_results_csv(out, cfg, res);
    CHECK(out.str().find("unit,sgin,2,4,0.10000000000000001,0,42,0.75\n") != std::string::npos);

    auto hcfg = small_config("ra");
    std::ostringstream hout;
    write_results_csv(hout, hcfg, res);
    CHECK(hout.str().find("unit,ra,0,0,0,0,42,0.75\n") != std::string::npos);
  }
}

TEST_CASE("depth sweep pairs depths on identical splits") {
  const graph g = test_graph();
  const auto cfg = small_config("utsage");

  const auto points = depth_sweep(g, cfg, {3, 1, 2, 3});
  REQUIRE(points.size() == 3);  // sorted, deduplicated
  CHECK(points[0].layers == 1);
  CHECK(points[1].layers == 2);
  CHECK(points[2].layers == 3);

  // each depth equals a standalone experiment at those layers
  auto cfg2 = cfg;
  cfg2.layers = 2;
  const auto standalone = run_experiment(g, cfg2);
  CHECK(points[1].mean == standalone.mean);
  CHECK(points[1].std_pop == standalone.std_pop);

  CHECK_THROWS_AS(depth_sweep(g, small_config("aa"), {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(depth_sweep(g, small_config("sgcn"), {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(depth_sweep(g, cfg, {}), std::invalid_argument);

  std::ostringstream out;
  write_depth_csv(out, points);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "layers,mean_auc,std");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("grid search sweeps only the layer axis for untrained methods") {
  const graph g = test_graph();
  const auto cfg = small_config("utgcn");
  const auto res = grid_search(g, cfg, grid_axes{});
  CHECK(res.table.size() == 3 * 3);  // three depths x three folds
  CHECK(res.best_hidden == 0);
  CHECK(res.best_lr == 0.0);
  CHECK((res.best_layers >= 1 && res.best_layers <= 3));
  double best_mean = -1.0;
  for (std::size_t l : {1u, 2u, 3u}) {
    double mean = 0.0;
    for (const auto& row : res.table)
      if (row.layers == l) mean += row.auc / 3.0;
    if (mean > best_mean) best_mean = mean;
  }
  CHECK_THAT(res.best_mean_auc, WithinAbs(best_mean, 1e-12));
}

TEST_CASE("grid search covers the full axes for trained methods") {
  const graph g = test_graph();
  auto cfg = small_config("sgcn");
  cfg.train.max_epochs = 10;
  grid_axes axes;
  axes.layers = {1, 2};
  axes.learning_rates = {0.1, 0.01};
  axes.hidden_dims = {4};
  const auto res = grid_search(g, cfg, axes, nullptr);
  CHECK(res.table.size() == 2 * 2 * 1 * 3);
  CHECK(res.best_hidden == 4);
  CHECK((res.best_lr == 0.1 || res.best_lr == 0.01));

  const auto res2 = grid_search(g, cfg, axes, nullptr);
  CHECK(res.best_layers == res2.best_layers);
  CHECK(res.best_lr == res2.best_lr);
  REQUIRE(res.table.size() == res2.table.size());
  for (std::size_t i = 0; i < res.table.size(); ++i)
    CHECK(res.table[i].auc == res2.table[i].auc);
}

TEST_CASE("grid search rejects heuristics and empty axes") {
  const graph g = test_graph();
  CHECK_THROWS_AS(grid_search(g, small_config("katz"), grid_axes{}), std::invalid_argument);
  grid_axes empty;
  empty.layers = {};
  CHECK_THROWS_AS(grid_search(g, small_config("utgcn"), empty), std::invalid_argument);
}

TEST_CASE("cv table serializes with one row per point and fold") {
  grid_result res;
  res.table = {{1, 16, 0.1, 0, 0.5}, {1, 16, 0.1, 1, 0.625}};
  std::ostringstream out;
  write_cv_csv(out, res);
  CHECK(out.str() ==
        "layers,hidden,lr,fold,auc\n"
        "1,16,0.10000000000000001,0,0.5\n"
        "1,16,0.10000000000000001,1,0.625\n");
}
