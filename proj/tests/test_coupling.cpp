#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "pzf/coupling.hpp"
#include "pzf/forcing.hpp"
#include "pzf/graph.hpp"
#include "pzf/rng.hpp"

using namespace pzf;

namespace {
VertexSet set_of(Vertex n, std::initializer_list<Vertex> vs) {
  VertexSet s(n);
  for (Vertex v : vs) s.set(v);
  return s;
}
bool subset(const VertexSet& a, const VertexSet& b) { return (a & ~b).none(); }
}  // namespace

TEST_CASE("subset coupling keeps the larger start ahead on every round") {
  const Graph g = sample_gnp(60, 0.15, 4);
  const VertexSet s1 = set_of(60, {0});
  const VertexSet s2 = set_of(60, {0, 1, 2});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CoupledResult r = coupled_run_subset(g, s1, s2, 200, seed);
    CHECK(r.containment);
    CHECK(!r.first_violation.has_value());
    REQUIRE(r.blue1.size() == r.blue2.size());
    for (std::size_t i = 0; i < r.blue1.size(); ++i) CHECK(subset(r.blue1[i], r.blue2[i]));
  }
}

TEST_CASE("subset coupling rejects non-nested starts") {
  const Graph p4 = named_graph("path", 4);
  CHECK_THROWS_AS(coupled_run_subset(p4, set_of(4, {0}), set_of(4, {1}), 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(coupled_run_subset(p4, set_of(4, {}), set_of(4, {1}), 10, 1),
                  std::invalid_argument);
}

TEST_CASE("equal starts produce identical trajectories") {
  const Graph c4 = named_graph("cycle", 4);
  const VertexSet s = set_of(4, {1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CoupledResult r = coupled_run_subset(c4, s, s, 50, seed);
    REQUIRE(r.blue1.size() == r.blue2.size());
    for (std::size_t i = 0; i < r.blue1.size(); ++i) CHECK(r.blue1[i] == r.blue2[i]);
  }
}

TEST_CASE("coupled marginals match the plain process law") {
  // P(process from the middle of path(3) finishes in one round) = 1/4; the
  // smaller marginal inside the coupling must follow the same law.
  const Graph p3 = named_graph("path", 3);
  const VertexSet s1 = set_of(3, {1});
  const VertexSet s2 = set_of(3, {0, 1});
  const int trials = 30000;
  int one_round = 0, larger_one_round = 0;
  for (int k = 0; k < trials; ++k) {
    const CoupledResult r = coupled_run_subset(p3, s1, s2, 20, derive_seed(33, k));
    // blue1 holds the start set plus one entry per round.
    one_round += r.blue1.size() >= 2 && r.blue1[1].count() == 3;
    larger_one_round += r.blue2.size() >= 2 && r.blue2[1].count() == 3;
  }
  const double freq = static_cast<double>(one_round) / trials;
  const double se = std::sqrt(0.25 * 0.75 / trials);
  CHECK(std::abs(freq - 0.25) <= 5 * se);
  // From {0,1} the last vertex is forced with probability 1 (rate 2/2).
  CHECK(larger_one_round == trials);
}

TEST_CASE("alternative coupling with a valid bound is contained and unflagged") {
  const Graph c5 = named_graph("cycle", 5);
  const VertexSet s = set_of(5, {0});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CoupledResult r = coupled_run_alternative(c5, s, RuleSpec::alternative(1.0), 100, seed);
    CHECK(r.containment);
    CHECK(!r.validity_violation);
  }
}

TEST_CASE("alternative coupling flags an invalid bound honestly") {
  // d_lower above the true degree makes the alternative rate smaller than the
  // standard one; the construction falls back to a common threshold, keeps
  // both marginals exact, and reports the violation.
  const Graph c5 = named_graph("cycle", 5);
  const VertexSet s = set_of(5, {0});
  int flagged = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    flagged += coupled_run_alternative(c5, s, RuleSpec::alternative(5.0), 100, seed).validity_violation;
  // The very first round compares 1/2 against 1/5, so every run flags.
  CHECK(flagged == 50);
}

TEST_CASE("alternative coupling demands the alternative rule") {
  const Graph c5 = named_graph("cycle", 5);
  CHECK_THROWS_AS(coupled_run_alternative(c5, set_of(5, {0}), RuleSpec::standard(), 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(coupled_run_alternative(c5, set_of(5, {0}), RuleSpec::alternative(0.0), 10, 1),
                  std::invalid_argument);
}

TEST_CASE("event estimates are exact on trivial targets and calibrated otherwise") {
  const Graph p3 = named_graph("path", 3);
  const EventEstimate trivial = estimate_force_event_probability(
      p3, set_of(3, {0, 1}), set_of(3, {0}), 5, 1000, 9);
  CHECK(trivial.estimate == 1.0);
  CHECK(trivial.se == 0.0);

  // P(all blue within one round from the middle) = 1/4.
  const EventEstimate est = estimate_force_event_probability(
      p3, set_of(3, {1}), set_of(3, {0, 1, 2}), 1, 40000, 10);
  CHECK(std::abs(est.estimate - 0.25) <= 5 * est.se);
  CHECK(est.trials == 40000);
}

TEST_CASE("event probability is monotone in the start set") {
  const Graph p4 = named_graph("path", 4);
  VertexSet all(4);
  all.set();
  const std::uint32_t trials = 20000;
  const EventEstimate small = estimate_force_event_probability(
      p4, set_of(4, {0}), all, 2, trials, 21);
  const EventEstimate big = estimate_force_event_probability(
      p4, set_of(4, {0, 1}), all, 2, trials, 22);
  const double combined = std::sqrt(small.se * small.se + big.se * big.se);
  CHECK(big.estimate >= small.estimate - 5 * combined);
}

TEST_CASE("coupled outputs serialize cleanly") {
  const Graph p4 = named_graph("path", 4);
  const CoupledResult r = coupled_run_subset(p4, set_of(4, {0}), set_of(4, {0, 3}), 50, 77);
  const nlohmann::json j = nlohmann::json::parse(coupled_jsonl_line(77, r));
  CHECK(j["seed"] == 77);
  CHECK(j["containment"] == r.containment);
  CHECK(j["b1"].is_array());
  const std::string row = coupled_csv_row(77, r);
  CHECK(row.substr(0, 3) == "77,");
  CHECK(coupled_csv_header().find("containment") != std::string::npos);
}
