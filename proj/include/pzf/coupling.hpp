#ifndef PZF_COUPLING_HPP
#define PZF_COUPLING_HPP

// Pathwise couplings of two forcing processes on one probability space.
// Shared events read identical randomness through counter-indexed draws, so
// blue-set containment between the two processes holds surely, not just in
// distribution; any false verdict is an implementation bug, and the runners
// report it rather than assert.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pzf/forcing.hpp"
#include "pzf/graph.hpp"

namespace pzf {

struct CoupledResult {
  std::vector<VertexSet> blue1, blue2;  // per round; index 0 is the start
  bool containment = true;
  std::optional<std::uint32_t> first_violation;
  bool validity_violation = false;  // alternative rate fell below standard
};

std::vector<std::uint64_t> blue_counts(const std::vector<VertexSet>& sets);

// Standard-rule processes from nested starts s1 subset of s2. Process 1 runs
// purely at random; process 2 copies each shared per-edge force and draws a
// Bernoulli((q2-q1)/(1-q1)) top-up where its rate q2 exceeds q1; sources blue
// only in process 2 draw fresh at q2. Stops early once both processes are
// complete. Throws unless {} != s1 subset of s2 subset of V.
CoupledResult coupled_run_subset(const Graph& g, const VertexSet& s1, const VertexSet& s2,
                                 std::uint32_t rounds, std::uint64_t seed);

// Standard rule versus the alternative rule from one start, same top-up
// construction per edge. When the alternative rate dips below the standard
// one (d_lower above the source's degree) the pair falls back to a common
// threshold draw on that edge: marginals stay exact, containment may fail,
// and the validity flag is set.
CoupledResult coupled_run_alternative(const Graph& g, const VertexSet& start, const RuleSpec& rule,
                                      std::uint32_t rounds, std::uint64_t seed);

struct EventEstimate {
  double estimate = 0;
  double se = 0;
  std::uint32_t trials = 0;
  std::uint32_t successes = 0;
};

// Monte Carlo estimate of the probability that every vertex of target is
// blue within `rounds` rounds of the standard process started from start.
// Trial k uses derive_seed(seed, k); the standard error is binomial.
EventEstimate estimate_force_event_probability(const Graph& g, const VertexSet& start,
                                               const VertexSet& target, std::uint32_t rounds,
                                               std::uint32_t trials, std::uint64_t seed);

std::string coupled_jsonl_line(std::uint64_t seed, const CoupledResult& r);
std::string coupled_csv_header();
std::string coupled_csv_row(std::uint64_t seed, const CoupledResult& r);

}  // namespace pzf

#endif  // PZF_COUPLING_HPP
