#include "pzf/exact.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pzf {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rational: empty string");
  if (s.find('/') != std::string::npos) {
    Rational q(s);
    q.canonicalize();
    return q;
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rational q(s);
    q.canonicalize();
    return q;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  std::size_t frac_len = s.size() - dot - 1;
  if (frac_len == 0 || digits.empty()) throw std::invalid_argument("rational: bad decimal");
  BigInt num(digits);
  BigInt den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string rational_str(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigInt binomial_coefficient(unsigned long n, unsigned long k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

StateMask mask_of(const VertexSet& s) {
  if (s.size() > 32) throw std::invalid_argument("state mask: more than 32 vertices");
  StateMask m = 0;
  for (auto v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    m |= StateMask{1} << v;
  return m;
}

namespace {

// q(u) = |N[u] cap blue| / deg(u) for blue u with at least one white
// neighbor; always <= 1 in that case.
Rational source_probability(const Graph& g, StateMask blue, Vertex u) {
  std::uint32_t c = 1;
  for (Vertex w : g.neighbors(u)) c += (blue >> w) & 1u;
  return make_rational(c, g.degree(u));
}

}  // namespace

TransitionDistribution transition_distribution_mask(const Graph& g, StateMask blue) {
  Vertex n = g.num_vertices();
  if (n > 32) throw std::invalid_argument("transition_distribution: graph too large");
  StateMask full = n == 32 ? ~StateMask{0} : (StateMask{1} << n) - 1;
  if (blue == 0 || (blue & ~full) || blue == full)
    throw std::invalid_argument("transition_distribution: blue must be a nonempty proper subset");
  if (!is_connected(g)) throw std::invalid_argument("transition_distribution: graph must be connected");

  // Per forcible white v: r(v) = 1 - prod over blue neighbors of (1 - q(u)).
  std::vector<Vertex> forcible;
  std::vector<Rational> r;
  std::vector<Rational> q_cache(n, Rational(0));
  std::vector<bool> q_known(n, false);
  for (Vertex v = 0; v < n; ++v) {
    if ((blue >> v) & 1u) continue;
    Rational miss(1);
    bool any = false;
    for (Vertex u : g.neighbors(v)) {
      if (!((blue >> u) & 1u)) continue;
      any = true;
      if (!q_known[u]) {
        q_cache[u] = source_probability(g, blue, u);
        q_known[u] = true;
      }
      miss *= 1 - q_cache[u];
    }
    if (!any) continue;
    forcible.push_back(v);
    r.push_back(1 - miss);
  }
  if (forcible.size() > 24)
    throw std::invalid_argument("transition_distribution: too many forcible whites to enumerate");

  TransitionDistribution dist;
  dist.base = blue;
  std::uint32_t outcomes = 1u << forcible.size();
  dist.entries.reserve(outcomes);
  for (std::uint32_t a = 0; a < outcomes; ++a) {
    Rational prob(1);
    StateMask succ = blue;
    for (std::size_t i = 0; i < forcible.size(); ++i) {
      if ((a >> i) & 1u) {
        prob *= r[i];
        succ |= StateMask{1} << forcible[i];
      } else {
        prob *= 1 - r[i];
      }
    }
    dist.entries.emplace_back(succ, prob);
  }
  std::sort(dist.entries.begin(), dist.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Merge duplicates: distinct forced subsets can land on one successor only
  // if they differ, which cannot happen here, but keep the sum honest anyway.
  std::vector<std::pair<StateMask, Rational>> merged;
  for (auto& e : dist.entries) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(std::move(e));
  }
  dist.entries = std::move(merged);
  return dist;
}

TransitionDistribution transition_distribution(const Graph& g, const VertexSet& blue) {
  return transition_distribution_mask(g, mask_of(blue));
}

namespace {

Rational solve_expectation(const Graph& g, StateMask state, StateMask full,
                           std::map<StateMask, Rational>& memo) {
  if (state == full) return Rational(0);
  auto it = memo.find(state);
  if (it != memo.end()) return it->second;

  TransitionDistribution dist = transition_distribution_mask(g, state);
  Rational stay(0);
  Rational acc(1);
  for (const auto& [succ, prob] : dist.entries) {
    if (succ == state)
      stay = prob;
    else
      acc += prob * solve_expectation(g, succ, full, memo);
  }
  if (stay >= 1)
    throw std::invalid_argument("expected_propagation_time: absorbing is unreachable");
  Rational e = acc / (1 - stay);
  memo.emplace(state, e);
  return e;
}

StateMask full_mask(Vertex n) { return n == 32 ? ~StateMask{0} : (StateMask{1} << n) - 1; }

void check_solver_pre(const Graph& g, Vertex cap) {
  if (g.num_vertices() > cap)
    throw std::invalid_argument("exact solver: graph exceeds the size cap");
  if (!is_connected(g)) throw std::invalid_argument("exact solver: graph must be connected");
}

}  // namespace

Rational expected_propagation_time(const Graph& g, const VertexSet& start, Vertex cap) {
  check_solver_pre(g, cap);
  StateMask s = mask_of(start);
  if (s == 0) throw std::invalid_argument("exact solver: empty start");
  std::map<StateMask, Rational> memo;
  return solve_expectation(g, s, full_mask(g.num_vertices()), memo);
}

std::map<StateMask, Rational> expectation_table(const Graph& g, const VertexSet& start, Vertex cap) {
  check_solver_pre(g, cap);
  StateMask s = mask_of(start);
  if (s == 0) throw std::invalid_argument("exact solver: empty start");
  std::map<StateMask, Rational> memo;
  solve_expectation(g, s, full_mask(g.num_vertices()), memo);
  memo.emplace(full_mask(g.num_vertices()), Rational(0));
  return memo;
}

std::pair<Vertex, Rational> min_expected_propagation_time(const Graph& g, Vertex cap) {
  check_solver_pre(g, cap);
  if (g.num_vertices() == 0) throw std::invalid_argument("exact solver: empty graph");
  std::map<StateMask, Rational> memo;  // shared: E[Z] depends only on Z
  StateMask full = full_mask(g.num_vertices());
  Vertex best_v = 0;
  Rational best;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    Rational e = solve_expectation(g, StateMask{1} << v, full, memo);
    if (v == 0 || e < best) {
      best = e;
      best_v = v;
    }
  }
  return {best_v, best};
}

// ---------------------------------------------------------------------------
// Exhaustive one-round oracles.

namespace {

struct CrossModel {
  std::vector<Vertex> sources;  // y0, ascending
  std::vector<Vertex> whites;   // complement, ascending
  Rational p;
  Rational d_lower;
  std::vector<std::pair<std::size_t, std::size_t>> in_pairs;  // index pairs into sources
};

CrossModel build_model(Vertex n, const Rational& p, const std::vector<Vertex>& y0,
                       const Rational& d_lower, Vertex n_cap) {
  if (n < 2 || n > n_cap) throw std::invalid_argument("oracle: n out of range");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("oracle: p must lie strictly in (0,1)");
  if (!(d_lower > 0)) throw std::invalid_argument("oracle: d_lower must be positive");
  CrossModel m;
  m.p = p;
  m.d_lower = d_lower;
  VertexSet in_set(n);
  for (Vertex u : y0) {
    if (u >= n) throw std::invalid_argument("oracle: y0 vertex out of range");
    in_set.set(u);
  }
  if (in_set.none() || in_set.count() == n)
    throw std::invalid_argument("oracle: y0 must be a nonempty proper subset");
  for (Vertex u = 0; u < n; ++u) (in_set.test(u) ? m.sources : m.whites).push_back(u);
  for (std::size_t i = 0; i < m.sources.size(); ++i)
    for (std::size_t j = i + 1; j < m.sources.size(); ++j) m.in_pairs.emplace_back(i, j);
  return m;
}

// Forcing rate per present edge of source i given its within-y0 degree count.
Rational clamp_rate(const Rational& c_over_dl) { return c_over_dl > 1 ? Rational(1) : c_over_dl; }

std::string set_str(const std::vector<Vertex>& whites, std::uint32_t mask) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t j = 0; j < whites.size(); ++j) {
    if ((mask >> j) & 1u) {
      if (!first) os << ',';
      os << whites[j];
      first = false;
    }
  }
  os << '}';
  return os.str();
}

// Walks every within-y0 edge configuration and every cross-pair outcome
// (absent / present+forced / present+unforced), handing each leaf its exact
// probability and per-pair states. visit(in_mask, a_rates, states, prob).
template <typename Visit>
void enumerate_outcomes(const CrossModel& m, Visit&& visit) {
  std::size_t k = m.sources.size(), w = m.whites.size(), pairs = k * w;
  std::vector<std::uint8_t> states(pairs, 0);
  for (std::uint32_t in_mask = 0; in_mask < (1u << m.in_pairs.size()); ++in_mask) {
    Rational in_prob(1);
    std::vector<std::uint32_t> closed_deg(k, 1);  // deg_{y0}[u] counts u itself
    for (std::size_t t = 0; t < m.in_pairs.size(); ++t) {
      if ((in_mask >> t) & 1u) {
        in_prob *= m.p;
        ++closed_deg[m.in_pairs[t].first];
        ++closed_deg[m.in_pairs[t].second];
      } else {
        in_prob *= 1 - m.p;
      }
    }
    std::vector<Rational> a(k);
    for (std::size_t i = 0; i < k; ++i)
      a[i] = clamp_rate(Rational(closed_deg[i]) / m.d_lower);

    // Per-pair outcome weights for source i.
    std::vector<std::array<Rational, 3>> weight(k);
    for (std::size_t i = 0; i < k; ++i)
      weight[i] = {1 - m.p, m.p * a[i], m.p * (1 - a[i])};

    auto dfs = [&](auto&& self, std::size_t t, const Rational& prob) -> void {
      if (t == pairs) {
        visit(in_mask, a, states, prob);
        return;
      }
      std::size_t i = t / w;
      for (std::uint8_t s = 0; s < 3; ++s) {
        if (weight[i][s] == 0 && s == 2) continue;  // a == 1: unforced-present impossible
        states[t] = s;
        self(self, t + 1, prob * weight[i][s]);
      }
    };
    dfs(dfs, 0, in_prob);
  }
}

constexpr std::uint8_t ABSENT = 0, FORCED = 1, UNFORCED = 2;

}  // namespace

OracleReport verify_lemma_edge_probability(Vertex n, const Rational& p,
                                           const std::vector<Vertex>& y0,
                                           const Rational& d_lower) {
  CrossModel m = build_model(n, p, y0, d_lower, 6);
  std::size_t k = m.sources.size(), w = m.whites.size(), pairs = k * w;

  struct Entry {
    Rational total = 0;
    std::vector<Rational> present;  // probability mass with pair present but unforced
  };

  OracleReport rep;
  rep.kind = "lemma_edge_probability";
  rep.bound = p;
  rep.worst_value = 0;
  rep.closed_form_match = true;

  // Events are keyed by the forced-set tuple; the within-y0 configuration is
  // part of the conditioning, so maps reset per in_mask. a_rates are constant
  // given in_mask; capture them per group for the closed-form check.
  std::uint32_t current_in = 0;
  std::map<std::uint64_t, Entry> groups;
  std::vector<Rational> a_now;

  auto flush = [&]() {
    for (const auto& [key, e] : groups) {
      if (e.total == 0) continue;
      for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t forced_mask = static_cast<std::uint32_t>((key >> (i * w)) & ((1u << w) - 1));
        for (std::size_t j = 0; j < w; ++j) {
          if ((forced_mask >> j) & 1u) continue;  // the bound only constrains v outside S_u
          Rational cond = e.present[i * w + j] / e.total;
          ++rep.events_checked;
          if (cond > rep.worst_value) {
            rep.worst_value = cond;
            std::ostringstream os;
            os << "in_edges=" << current_in << " forced=[";
            for (std::size_t s = 0; s < k; ++s) {
              if (s) os << ' ';
              os << m.sources[s] << ":"
                 << set_str(m.whites, static_cast<std::uint32_t>((key >> (s * w)) & ((1u << w) - 1)));
            }
            os << "] edge=(" << m.sources[i] << ',' << m.whites[j] << ")";
            rep.worst_witness = os.str();
          }
          // Independent confirmation of the corrected closed form.
          Rational expect = p * (1 - a_now[i]) / (1 - p * a_now[i]);
          if (cond != expect) rep.closed_form_match = false;
        }
      }
    }
    groups.clear();
  };

  enumerate_outcomes(m, [&](std::uint32_t in_mask, const std::vector<Rational>& a,
                            const std::vector<std::uint8_t>& states, const Rational& prob) {
    if (in_mask != current_in || groups.empty()) {
      if (in_mask != current_in) {
        flush();
        current_in = in_mask;
      }
      a_now = a;
    }
    std::uint64_t key = 0;
    for (std::size_t t = 0; t < pairs; ++t)
      if (states[t] == FORCED) key |= std::uint64_t{1} << ((t / w) * w + (t % w));
    auto& e = groups[key];
    if (e.present.empty()) e.present.assign(pairs, Rational(0));
    e.total += prob;
    for (std::size_t t = 0; t < pairs; ++t)
      if (states[t] == UNFORCED) e.present[t] += prob;
  });
  flush();

  rep.pass = rep.worst_value <= p;
  return rep;
}

OracleReport verify_edge_count_domination(Vertex n, const Rational& p,
                                          const std::vector<Vertex>& y0,
                                          const Rational& d_lower) {
  CrossModel m = build_model(n, p, y0, d_lower, 5);
  std::size_t k = m.sources.size(), w = m.whites.size(), pairs = k * w;

  struct Entry {
    Rational total = 0;
    std::map<std::uint32_t, Rational> edge_dist;  // e(y0, S) -> mass
  };

  OracleReport rep;
  rep.kind = "edge_count_domination";
  rep.bound = 0;  // minimum CDF gap must stay >= 0
  bool first_gap = true;

  std::uint32_t current_in = 0;
  std::map<std::uint32_t, Entry> groups;  // union forced set -> conditional law

  auto flush = [&]() {
    for (const auto& [s_mask, e] : groups) {
      if (e.total == 0) continue;
      std::uint32_t s_size = static_cast<std::uint32_t>(std::popcount(s_mask));
      unsigned long trials = static_cast<unsigned long>(k) * s_size;
      Rational cdf_e = 0, cdf_bound = 0;
      auto it = e.edge_dist.begin();
      for (std::uint32_t t = 0; t <= trials; ++t) {
        while (it != e.edge_dist.end() && it->first <= t) {
          cdf_e += it->second;
          ++it;
        }
        if (t >= s_size) {
          std::uint32_t j = t - s_size;
          if (j <= trials) {
            Rational term = Rational(binomial_coefficient(trials, j));
            for (std::uint32_t x = 0; x < j; ++x) term *= p;
            for (std::uint32_t x = j; x < trials; ++x) term *= 1 - p;
            cdf_bound += term;
          }
        }
        Rational gap = cdf_e / e.total - cdf_bound;
        ++rep.events_checked;
        if (first_gap || gap < rep.worst_value) {
          first_gap = false;
          rep.worst_value = gap;
          std::ostringstream os;
          os << "in_edges=" << current_in << " S=" << set_str(m.whites, s_mask) << " t=" << t;
          rep.worst_witness = os.str();
        }
      }
    }
    groups.clear();
  };

  enumerate_outcomes(m, [&](std::uint32_t in_mask, const std::vector<Rational>&,
                            const std::vector<std::uint8_t>& states, const Rational& prob) {
    if (in_mask != current_in) {
      flush();
      current_in = in_mask;
    }
    std::uint32_t s_union = 0;
    for (std::size_t t = 0; t < pairs; ++t)
      if (states[t] == FORCED) s_union |= 1u << (t % w);
    std::uint32_t e_count = 0;
    for (std::size_t t = 0; t < pairs; ++t)
      if (states[t] != ABSENT && ((s_union >> (t % w)) & 1u)) ++e_count;
    auto& e = groups[s_union];
    e.total += prob;
    e.edge_dist[e_count] += prob;
  });
  flush();

  rep.pass = !first_gap && rep.worst_value >= 0;
  if (first_gap) rep.pass = false;
  return rep;
}

std::string OracleReport::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["pass"] = pass;
  j["bound"] = rational_str(bound);
  j["worst_value"] = rational_str(worst_value);
  j["worst_witness"] = worst_witness;
  j["events_checked"] = events_checked;
  if (kind == "lemma_edge_probability") j["closed_form_match"] = closed_form_match;
  return j.dump(2);
}

}  // namespace pzf
