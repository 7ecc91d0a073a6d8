#ifndef PZF_EXACT_HPP
#define PZF_EXACT_HPP

// Exact rational analysis of the forcing process on small graphs: one-round
// transition laws, expected propagation times via the absorbing-chain
// recursion, and exhaustive oracles for the edge-probability and
// edge-count-domination lemmas. No floating point on any core path.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "pzf/graph.hpp"

namespace pzf {

using Rational = mpq_class;
using BigInt = mpz_class;

Rational make_rational(long num, long den);
Rational parse_rational(const std::string& s);  // "a/b", "a", or decimal "0.25"
std::string rational_str(const Rational& q);    // always "numerator/denominator"
BigInt binomial_coefficient(unsigned long n, unsigned long k);

// Blue sets as bitmasks over vertices 0..n-1; usable for n <= 32, and the
// solver enforces its own smaller cap.
using StateMask = std::uint32_t;

StateMask mask_of(const VertexSet& s);

struct TransitionDistribution {
  StateMask base = 0;
  // successor mask -> exact probability, masks ascending; includes the
  // self-transition (no force this round) and sums to exactly 1.
  std::vector<std::pair<StateMask, Rational>> entries;
};

// One-round law from a nonempty proper blue set on a connected graph. Each
// white v with a blue neighbor turns blue independently with probability
// r(v) = 1 - prod_{u in N(v) cap blue} (1 - |N[u] cap blue| / deg(u)); whites
// without blue neighbors never move and are excluded from enumeration.
TransitionDistribution transition_distribution(const Graph& g, const VertexSet& blue);
TransitionDistribution transition_distribution_mask(const Graph& g, StateMask blue);

inline constexpr Vertex EXACT_DEFAULT_CAP = 12;

// E[rounds to all-blue] from start, by memoized recursion over reachable
// states: E[Z] = (1 + sum_{Z' strictly above Z} P(Z->Z') E[Z']) / (1 - P(Z->Z)).
// Asserts P(Z->Z) < 1 on every reachable state (holds on connected graphs).
Rational expected_propagation_time(const Graph& g, const VertexSet& start,
                                   Vertex cap = EXACT_DEFAULT_CAP);

// The full memo table from a start: reachable state -> expected remaining rounds.
std::map<StateMask, Rational> expectation_table(const Graph& g, const VertexSet& start,
                                                Vertex cap = EXACT_DEFAULT_CAP);

// Minimum over singleton starts; ties resolve to the lowest vertex id.
std::pair<Vertex, Rational> min_expected_propagation_time(const Graph& g,
                                                          Vertex cap = EXACT_DEFAULT_CAP);

struct OracleReport {
  std::string kind;
  bool pass = false;
  Rational bound = 0;        // the inequality's right-hand side (p, or 0 for a CDF gap)
  Rational worst_value = 0;  // max conditional probability, or min CDF gap
  std::string worst_witness;
  std::uint64_t events_checked = 0;
  bool closed_form_match = true;  // edge-probability oracle only
  std::string to_json() const;
};

// One-round alternative-rule model on G(n,p) vertices 0..n-1 with sources y0:
// within-y0 edges appear with probability p; each source u then forces each
// outside vertex v along a present edge with probability a_u = min(1,
// deg_{y0}[u] / d_lower), where deg_{y0}[u] counts u itself plus its within-y0
// edges. The oracle enumerates every outcome exactly.
//
// Checks: for every positive-probability conditioning event (within-y0 edge
// configuration plus the per-source forced sets S_u) and every pair (u, v)
// with v outside y0 and v not in S_u, the conditional probability that edge
// (u,v) is present is <= p. Also verifies the closed form p(1-a)/(1-p*a).
OracleReport verify_lemma_edge_probability(Vertex n, const Rational& p,
                                           const std::vector<Vertex>& y0,
                                           const Rational& d_lower);

// Same model; conditions on the union S of forced sets (plus the within-y0
// configuration) and checks first-order stochastic dominance of the edge
// count e(y0, S) by |S| + Bin(|y0|*|S|, p) at every CDF point. Conditioning
// on the union is essential: fixing per-source forced sets can make two
// sources certify disjoint edges to the same target and break the bound.
OracleReport verify_edge_count_domination(Vertex n, const Rational& p,
                                          const std::vector<Vertex>& y0,
                                          const Rational& d_lower);

}  // namespace pzf

#endif  // PZF_EXACT_HPP
