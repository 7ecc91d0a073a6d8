#include "pzf/coupling.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pzf/rng.hpp"

namespace pzf {

namespace {

constexpr std::uint64_t TAG_MAIN = 1;
constexpr std::uint64_t TAG_TOPUP = 2;

struct RatePair {
  double q1 = 0, q2 = 0;
};

// Per-source rates for the two coupled processes. c1/c2 are closed blue
// neighborhood sizes under each process's own blue set.
using RateFn = RatePair (*)(std::uint32_t c1, std::uint32_t c2, std::uint32_t deg, double d_lower);

RatePair rates_standard(std::uint32_t c1, std::uint32_t c2, std::uint32_t deg, double) {
  return {static_cast<double>(c1) / deg, static_cast<double>(c2) / deg};
}

RatePair rates_alternative(std::uint32_t c1, std::uint32_t c2, std::uint32_t deg, double d_lower) {
  return {static_cast<double>(c1) / deg, std::min(static_cast<double>(c2) / d_lower, 1.0)};
}

// One synchronized round. Each eligible blue-white edge (u, v) reads the
// uniform at counter position (round, u, v); shared events read the same
// position in both processes, single-process events read it alone, so every
// draw is fresh exactly where the construction needs independence.
void coupled_round(const Graph& g, std::uint64_t seed, std::uint32_t round, RateFn rates,
                   double d_lower, VertexSet& blue1, VertexSet& blue2, bool& validity_violation) {
  const Vertex n = g.num_vertices();
  VertexSet next1 = blue1, next2 = blue2;
  for (Vertex u = 0; u < n; ++u) {
    const bool s1 = blue1.test(u), s2 = blue2.test(u);
    if (!s1 && !s2) continue;
    const auto nbrs = g.neighbors(u);
    if (nbrs.empty()) continue;

    std::uint32_t c1 = 1, c2 = 1;
    bool any_white = false;
    for (Vertex v : nbrs) {
      c1 += s1 && blue1.test(v);
      c2 += s2 && blue2.test(v);
      any_white = any_white || !blue1.test(v) || !blue2.test(v);
    }
    if (!any_white) continue;
    const RatePair q = rates(c1, c2, static_cast<std::uint32_t>(nbrs.size()), d_lower);

    for (Vertex v : nbrs) {
      const bool w1 = s1 && !blue1.test(v);
      const bool w2 = s2 && !blue2.test(v);
      if (!w1 && !w2) continue;
      const double u01 = counter_u01(seed, round, u, v, TAG_MAIN);
      if (w1 && w2) {
        if (q.q2 >= q.q1) {
          const bool f1 = u01 < q.q1;
          bool f2 = f1;
          if (!f1 && q.q1 < 1.0) {
            const double topup = (q.q2 - q.q1) / (1.0 - q.q1);
            f2 = counter_u01(seed, round, u, v, TAG_TOPUP) < topup;
          }
          if (f1) next1.set(v);
          if (f2) next2.set(v);
        } else {
          // Alternative rate below standard: common-threshold fallback keeps
          // both marginals exact but cannot promise containment.
          validity_violation = true;
          if (u01 < q.q1) next1.set(v);
          if (u01 < q.q2) next2.set(v);
        }
      } else if (w1) {
        if (u01 < q.q1) next1.set(v);
      } else {
        if (u01 < q.q2) next2.set(v);
      }
    }
  }
  blue1 = std::move(next1);
  blue2 = std::move(next2);
}

CoupledResult run_coupled(const Graph& g, const VertexSet& s1, const VertexSet& s2,
                          std::uint32_t rounds, std::uint64_t seed, RateFn rates, double d_lower) {
  CoupledResult r;
  VertexSet blue1 = s1, blue2 = s2;
  r.blue1.push_back(blue1);
  r.blue2.push_back(blue2);
  for (std::uint32_t round = 1; round <= rounds; ++round) {
    if (blue1.all() && blue2.all()) break;
    coupled_round(g, seed, round, rates, d_lower, blue1, blue2, r.validity_violation);
    r.blue1.push_back(blue1);
    r.blue2.push_back(blue2);
    if (r.containment && !blue1.is_subset_of(blue2)) {
      r.containment = false;
      r.first_violation = round;
    }
  }
  return r;
}

void check_start(const Graph& g, const VertexSet& s, const char* what) {
  if (s.size() != g.num_vertices()) throw std::invalid_argument(std::string(what) + ": size mismatch");
  if (s.none()) throw std::invalid_argument(std::string(what) + ": start set is empty");
}

}  // namespace

std::vector<std::uint64_t> blue_counts(const std::vector<VertexSet>& sets) {
  std::vector<std::uint64_t> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(s.count());
  return out;
}

CoupledResult coupled_run_subset(const Graph& g, const VertexSet& s1, const VertexSet& s2,
                                 std::uint32_t rounds, std::uint64_t seed) {
  check_start(g, s1, "coupled_run_subset");
  if (s2.size() != g.num_vertices() || !s1.is_subset_of(s2))
    throw std::invalid_argument("coupled_run_subset: s1 must be a subset of s2");
  return run_coupled(g, s1, s2, rounds, seed, rates_standard, 0.0);
}

CoupledResult coupled_run_alternative(const Graph& g, const VertexSet& start, const RuleSpec& rule,
                                      std::uint32_t rounds, std::uint64_t seed) {
  check_start(g, start, "coupled_run_alternative");
  if (rule.kind != RuleKind::alternative)
    throw std::invalid_argument("coupled_run_alternative: rule must be alternative");
  if (!(rule.d_lower > 0)) throw std::invalid_argument("coupled_run_alternative: d_lower must be positive");
  // An empty active-round set makes the alternative process identical to the
  // standard one; couple it as standard-vs-standard from equal starts.
  RateFn rates = rule.active_all ? rates_alternative : rates_standard;
  return run_coupled(g, start, start, rounds, seed, rates, rule.d_lower);
}

EventEstimate estimate_force_event_probability(const Graph& g, const VertexSet& start,
                                               const VertexSet& target, std::uint32_t rounds,
                                               std::uint32_t trials, std::uint64_t seed) {
  check_start(g, start, "estimate_force_event_probability");
  if (target.size() != g.num_vertices())
    throw std::invalid_argument("estimate_force_event_probability: target size mismatch");
  if (trials < 1) throw std::invalid_argument("estimate_force_event_probability: trials must be positive");

  EventEstimate out;
  out.trials = trials;
  if (target.is_subset_of(start)) {  // success at round 0 regardless of draws
    out.successes = trials;
    out.estimate = 1.0;
    out.se = 0.0;
    return out;
  }
  for (std::uint32_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    ForcingProcess proc(g, start, RuleSpec::standard());
    auto draw = [&](Vertex, Vertex) { return rng.uniform01(); };
    for (std::uint32_t round = 0; round < rounds; ++round) {
      if (target.is_subset_of(proc.blue())) break;
      if (proc.probabilistic_round(draw) == 0) break;
    }
    out.successes += target.is_subset_of(proc.blue());
  }
  out.estimate = static_cast<double>(out.successes) / trials;
  out.se = std::sqrt(out.estimate * (1.0 - out.estimate) / trials);
  return out;
}

std::string coupled_jsonl_line(std::uint64_t seed, const CoupledResult& r) {
  nlohmann::json j;
  j["seed"] = seed;
  j["b1"] = blue_counts(r.blue1);
  j["b2"] = blue_counts(r.blue2);
  j["containment"] = r.containment;
  if (r.first_violation)
    j["first_violation"] = *r.first_violation;
  else
    j["first_violation"] = nullptr;
  j["validity_violation"] = r.validity_violation;
  return j.dump();
}

std::string coupled_csv_header() { return "seed,rounds,containment,first_violation,validity_violation"; }

std::string coupled_csv_row(std::uint64_t seed, const CoupledResult& r) {
  std::string row = std::to_string(seed);
  row += ',';
  row += std::to_string(r.blue1.size() - 1);
  row += ',';
  row += r.containment ? "true" : "false";
  row += ',';
  if (r.first_violation) row += std::to_string(*r.first_violation);
  row += ',';
  row += r.validity_violation ? "true" : "false";
  return row;
}

}  // namespace pzf
