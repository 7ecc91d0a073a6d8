#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pzf/graph.hpp"
#include "pzf/rng.hpp"

using namespace pzf;

TEST_CASE("named families have the right shape") {
  const Graph p5 = named_graph("path", 5);
  CHECK(p5.num_vertices() == 5);
  CHECK(p5.num_edges() == 4);
  CHECK(p5.degree(0) == 1);
  CHECK(p5.degree(2) == 2);
  CHECK_NOTHROW(p5.validate());
  CHECK(is_connected(p5));

  const Graph c6 = named_graph("cycle", 6);
  CHECK(c6.num_edges() == 6);
  for (Vertex v = 0; v < 6; ++v) CHECK(c6.degree(v) == 2);

  // star(n) is the star with n leaves: n + 1 vertices, center first.
  const Graph s5 = named_graph("star", 5);
  CHECK(s5.num_vertices() == 6);
  CHECK(s5.num_edges() == 5);
  CHECK(s5.degree(0) == 5);
  CHECK(s5.degree(3) == 1);

  const Graph k4 = named_graph("complete", 4);
  CHECK(k4.num_edges() == 6);
  CHECK(k4.degree(2) == 3);

  CHECK_THROWS_AS(named_graph("torus", 4), std::invalid_argument);
}

TEST_CASE("from_edges rejects malformed input") {
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3}}), std::invalid_argument);
  const Graph g = Graph::from_edges(3, {{2, 0}, {1, 2}});
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(2) == 2);
}

TEST_CASE("neighborhood is the external neighborhood") {
  const Graph p3 = named_graph("path", 3);
  VertexSet s(3);
  s.set(1);
  const VertexSet n1 = neighborhood(p3, s);
  CHECK(n1.test(0));
  CHECK(!n1.test(1));  // the set itself is excluded
  CHECK(n1.test(2));
  CHECK_THROWS_AS(neighborhood(p3, VertexSet(5)), std::invalid_argument);
}

TEST_CASE("edge list round trip is byte exact") {
  const Graph g = sample_gnp(40, 0.2, 99);
  std::stringstream buf;
  write_edge_list(g, buf);
  const std::string first = buf.str();
  const Graph back = read_edge_list(buf);
  std::stringstream buf2;
  write_edge_list(back, buf2);
  CHECK(first == buf2.str());
  CHECK(back.num_edges() == g.num_edges());
}

TEST_CASE("gnp sampling is seed deterministic") {
  const Graph a = sample_gnp(300, 0.05, 7);
  const Graph b = sample_gnp(300, 0.05, 7);
  const Graph c = sample_gnp(300, 0.05, 8);
  std::stringstream sa, sb, sc;
  write_edge_list(a, sa);
  write_edge_list(b, sb);
  write_edge_list(c, sc);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("gnp edge cases and moments") {
  CHECK(sample_gnp(50, 0.0, 1).num_edges() == 0);
  CHECK(sample_gnp(50, 1.0, 1).num_edges() == 50u * 49 / 2);
  CHECK_THROWS_AS(sample_gnp(50, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_gnp(50, 1.5, 1), std::invalid_argument);

  // Both sampler modes, edge count within 5 standard deviations of its mean.
  for (double p : {0.3, 0.02}) {
    const Graph g = sample_gnp(1500, p, 42);
    const double pairs = 1500.0 * 1499.0 / 2.0;
    const double sd = std::sqrt(pairs * p * (1 - p));
    CHECK(std::abs(static_cast<double>(g.num_edges()) - pairs * p) <= 5 * sd);
    CHECK_NOTHROW(g.validate());
  }
  CHECK(gnp_sampler_mode(0.3) != gnp_sampler_mode(0.02));
}

TEST_CASE("is_connected sees components") {
  CHECK(is_connected(named_graph("cycle", 8)));
  const Graph two = Graph::from_edges(4, {{0, 1}, {2, 3}});
  CHECK(!is_connected(two));
}

TEST_CASE("expansion audit accepts a complete graph and rejects a path") {
  ExpansionOptions opts;
  opts.d = 29;
  opts.degree_tolerance = 0.05;
  opts.set_tolerance = 0.5;
  const ExpansionReport good = check_expansion(named_graph("complete", 30), 4.0, 50, 11, opts);
  CHECK(good.degrees_ok);
  CHECK(good.all_ok);
  CHECK(good.min_degree == 29);

  ExpansionOptions strict;
  strict.d = 2.0;
  strict.degree_tolerance = 0.1;  // path endpoints have degree 1, deviation 0.5
  strict.set_tolerance = 0.5;
  const ExpansionReport bad = check_expansion(named_graph("path", 30), 4.0, 50, 11, strict);
  CHECK(!bad.degrees_ok);
  CHECK(!bad.all_ok);
}

TEST_CASE("seed derivation separates domains and indices") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1 ^ SEED_DOMAIN_GRAPH, 0) != derive_seed(1 ^ SEED_DOMAIN_TRIAL, 0));
  Rng r(5);
  const double u = r.uniform01();
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
  Rng r2(5);
  CHECK(r2.uniform01() == u);
}
