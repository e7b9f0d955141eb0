#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "utlink/graph.hpp"
#include "utlink/rng.hpp"

using namespace utlink;

TEST_CASE("parse collapses duplicates and drops self-loops") {
  std::istringstream in("a b\nb a\na a\n");
  parse_stats st;
  const graph g = parse_edge_list(in, &st);
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(st.edge_lines == 3);
  CHECK(st.duplicates == 1);
  CHECK(st.self_loops == 1);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
}

TEST_CASE("parse skips comments and blanks, ids in first-appearance order") {
  std::istringstream in("# header\n\n  \nx y\n# mid\ny z\n");
  const graph g = parse_edge_list(in);
  REQUIRE(g.node_count() == 3);
  CHECK(g.label_of(0) == "x");
  CHECK(g.label_of(1) == "y");
  CHECK(g.label_of(2) == "z");
  CHECK(g.id_of("z") == 2);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("parse rejects malformed lines with the line number") {
  SECTION("one token") {
    std::istringstream in("a b\nc\n");
    CHECK_THROWS_MATCHES(parse_edge_list(in), parse_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 2")));
  }
  SECTION("three tokens") {
    std::istringstream in("a b c\n");
    CHECK_THROWS_AS(parse_edge_list(in), parse_error);
  }
  SECTION("empty input") {
    std::istringstream in("# nothing\n");
    CHECK_THROWS_AS(parse_edge_list(in), parse_error);
  }
}

TEST_CASE("edge list round trip preserves the adjacency relation") {
  const graph g = erdos_renyi(25, 0.3, 99);
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  // Reparsing assigns ids by first appearance, so compare through tokens.
  const graph h = parse_edge_list(in);
  REQUIRE(h.node_count() == g.node_count());
  REQUIRE(h.edge_count() == g.edge_count());
  for (const edge& e : g.edges())
    CHECK(h.has_edge(h.id_of(g.label_of(e.u)), h.id_of(g.label_of(e.v))));
}

TEST_CASE("from_edges normalizes input") {
  std::vector<edge> es{make_edge(2, 1), make_edge(1, 2), {0, 0}, make_edge(0, 3)};
  const graph g = graph::from_edges(4, es);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(3, 0));
  CHECK_FALSE(g.has_edge(0, 0));

  CHECK_THROWS_AS(graph::from_edges(2, {make_edge(0, 5)}), std::invalid_argument);
  CHECK_THROWS_AS(graph::from_edges(2, {make_edge(0, 1)}, {"only"}), std::invalid_argument);
  CHECK_THROWS_AS(graph::from_edges(2, {make_edge(0, 1)}, {"same", "same"}),
                  std::invalid_argument);
}

TEST_CASE("neighbor rows are sorted and degrees sum to twice the edge count") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const graph g = erdos_renyi(40, 0.15, seed);
    std::size_t total = 0;
    for (node_id v = 0; v < g.node_count(); ++v) {
      const auto row = g.neighbors(v);
      CHECK(std::is_sorted(row.begin(), row.end()));
      CHECK(g.aug_degree(v) == static_cast<double>(g.degree(v)) + 1.0);
      total += g.degree(v);
    }
    CHECK(total == 2 * g.edge_count());
  }
}

TEST_CASE("edges() enumerates canonical pairs in lexicographic order") {
  const graph g = erdos_renyi(20, 0.3, 5);
  const auto es = g.edges();
  REQUIRE(es.size() == g.edge_count());
  for (std::size_t i = 0; i < es.size(); ++i) {
    CHECK(es[i].u < es[i].v);
    if (i) CHECK(es[i - 1] < es[i]);
    CHECK(g.has_edge(es[i].u, es[i].v));
  }
}

TEST_CASE("remove_edges keeps node count and labels, rejects absent edges") {
  std::istringstream in("hub s1\nhub s2\nhub s3\n");
  const graph star = parse_edge_list(in);
  const graph cut = remove_edges(star, std::vector<edge>{make_edge(0, 1), make_edge(2, 0)});
  CHECK(cut.node_count() == 4);
  CHECK(cut.edge_count() == 1);
  CHECK(cut.degree(1) == 0);  // s1 isolated, still present
  CHECK(cut.label_of(1) == "s1");
  CHECK(cut.has_edge(cut.id_of("hub"), cut.id_of("s3")));

  CHECK_THROWS_AS(remove_edges(star, std::vector<edge>{make_edge(1, 2)}),
                  std::invalid_argument);
  // duplicate removal requests collapse
  const graph cut2 = remove_edges(star, std::vector<edge>{make_edge(0, 1), make_edge(1, 0)});
  CHECK(cut2.edge_count() == 2);
}

TEST_CASE("validate accepts built graphs and flags broken CSR input") {
  CHECK(validate(erdos_renyi(30, 0.2, 7)).ok());

  SECTION("unsorted row") {
    const graph g = graph::from_csr_unchecked({0, 2, 3, 4}, {2, 1, 0, 0});
    const auto rep = validate(g);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.rows_sorted);
  }
  SECTION("asymmetric") {
    const graph g = graph::from_csr_unchecked({0, 1, 1}, {1});
    const auto rep = validate(g);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.symmetric);
  }
  SECTION("self-loop stored") {
    const graph g = graph::from_csr_unchecked({0, 1, 2}, {0, 1});
    const auto rep = validate(g);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.loop_free);
  }
  SECTION("target out of range") {
    const graph g = graph::from_csr_unchecked({0, 1}, {9});
    CHECK_FALSE(validate(g).csr_consistent);
  }
  SECTION("non-monotone offsets") {
    const graph g = graph::from_csr_unchecked({0, 2, 1}, {1, 0});
    CHECK_FALSE(validate(g).csr_consistent);
  }
}

TEST_CASE("labels map both ways; unlabeled graphs fall back to numerals") {
  std::istringstream in("n5 n7\n");
  const graph g = parse_edge_list(in);
  CHECK(g.has_labels());
  CHECK(g.id_of("n7") == 1);
  CHECK_THROWS_AS(g.id_of("missing"), std::out_of_range);

  const graph plain = graph::from_edges(3, {make_edge(0, 2)});
  CHECK_FALSE(plain.has_labels());
  CHECK(plain.label_of(2) == "2");
  CHECK(plain.id_of("2") == 2);
  CHECK_THROWS_AS(plain.id_of("17"), std::out_of_range);
  CHECK_THROWS_AS(plain.id_of("x"), std::out_of_range);
}

TEST_CASE("random graphs are deterministic in the seed and respect density limits") {
  const graph a = erdos_renyi(30, 0.25, 11);
  const graph b = erdos_renyi(30, 0.25, 11);
  CHECK(std::ranges::equal(a.csr_offsets(), b.csr_offsets()));
  CHECK(std::ranges::equal(a.csr_targets(), b.csr_targets()));
  CHECK(erdos_renyi(30, 0.25, 12).edge_count() != 0);

  CHECK(erdos_renyi(10, 0.0, 1).edge_count() == 0);
  CHECK(erdos_renyi(10, 1.0, 1).edge_count() == 45);
}
