#include <doctest.h>

#include <gmpxx.h>
#include <json.hpp>

#include "pzf/exact.hpp"
#include "pzf/forcing.hpp"
#include "pzf/graph.hpp"

using namespace pzf;

namespace {
VertexSet set_of(Vertex n, std::initializer_list<Vertex> vs) {
  VertexSet s(n);
  for (Vertex v : vs) s.set(v);
  return s;
}
}  // namespace

TEST_CASE("rational helpers round trip") {
  CHECK(rational_str(make_rational(8, 3)) == "8/3");
  CHECK(rational_str(make_rational(4, 2)) == "2");
  CHECK(parse_rational("8/3") == make_rational(8, 3));
  CHECK(parse_rational("2") == make_rational(2, 1));
  CHECK(binomial_coefficient(5, 2) == make_rational(10, 1));
  CHECK(binomial_coefficient(0, 0) == make_rational(1, 1));
}

TEST_CASE("small golden expectations are exact") {
  const auto [v3, e3] = min_expected_propagation_time(named_graph("path", 3));
  CHECK(e3 == make_rational(2, 1));

  const auto [v4, e4] = min_expected_propagation_time(named_graph("path", 4));
  CHECK(e4 == make_rational(8, 3));
  CHECK(v4 == 1);

  const auto [vc, ec] = min_expected_propagation_time(named_graph("cycle", 4));
  CHECK(ec == make_rational(7, 3));
}

TEST_CASE("transition distribution from the middle of path(3)") {
  const Graph p3 = named_graph("path", 3);
  const TransitionDistribution d = transition_distribution(p3, set_of(3, {1}));
  CHECK(d.base == 0b010);
  REQUIRE(d.entries.size() == 4);
  // Each endpoint is forced independently with probability 1/2.
  const Rational q = make_rational(1, 4);
  Rational total = 0;
  for (const auto& [mask, prob] : d.entries) {
    CHECK(prob == q);
    total += prob;
  }
  CHECK(total == 1);
  CHECK(d.entries.front().first == 0b010);  // self-transition first (ascending)
  CHECK(d.entries.back().first == 0b111);
}

TEST_CASE("certain forces leave a zero-probability self transition") {
  const Graph p3 = named_graph("path", 3);
  const TransitionDistribution d = transition_distribution(p3, set_of(3, {0}));
  REQUIRE(d.entries.size() == 2);
  CHECK(d.entries[0].first == 0b001);
  CHECK(d.entries[0].second == 0);
  CHECK(d.entries[1].first == 0b011);
  CHECK(d.entries[1].second == 1);
}

TEST_CASE("transition probabilities always sum to one") {
  const Graph c5 = named_graph("cycle", 5);
  for (StateMask m = 1; m + 1 < (1u << 5); ++m) {
    const TransitionDistribution d = transition_distribution_mask(c5, m);
    Rational total = 0;
    for (const auto& [mask, prob] : d.entries) {
      total += prob;
      CHECK((mask & m) == m);  // successors only ever add vertices
    }
    CHECK(total == 1);
  }
}

TEST_CASE("expectation table is consistent with the solver") {
  const Graph p4 = named_graph("path", 4);
  const VertexSet start = set_of(4, {1});
  const auto table = expectation_table(p4, start);
  CHECK(table.at(mask_of(start)) == expected_propagation_time(p4, start));
  CHECK(table.at((1u << 4) - 1) == 0);
  // Minimum over singletons matches the direct per-vertex solve.
  Rational best = expected_propagation_time(p4, set_of(4, {0}));
  for (Vertex v = 1; v < 4; ++v) {
    const Rational e = expected_propagation_time(p4, set_of(4, {v}));
    if (e < best) best = e;
  }
  CHECK(best == min_expected_propagation_time(p4).second);
}

TEST_CASE("state-space cap refuses large graphs") {
  CHECK_THROWS_AS(min_expected_propagation_time(named_graph("path", 13)),
                  std::invalid_argument);
  CHECK_NOTHROW(min_expected_propagation_time(named_graph("path", 13), 13));
}

TEST_CASE("edge probability oracle holds on a small configuration") {
  const OracleReport rep =
      verify_lemma_edge_probability(3, make_rational(1, 4), {0}, make_rational(2, 1));
  CHECK(rep.pass);
  CHECK(rep.closed_form_match);
  CHECK(rep.events_checked > 0);
}

TEST_CASE("edge count domination oracle holds on a small configuration") {
  const OracleReport rep =
      verify_edge_count_domination(3, make_rational(1, 4), {0}, make_rational(2, 1));
  CHECK(rep.pass);
  CHECK(rep.closed_form_match);
  const nlohmann::json j = nlohmann::json::parse(rep.to_json());
  CHECK(j.contains("pass"));
  CHECK(j.contains("events_checked"));
}
