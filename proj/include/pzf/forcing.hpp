#ifndef PZF_FORCING_HPP
#define PZF_FORCING_HPP

// Round-synchronized forcing processes on a shared immutable graph.
//
// One round: every blue u attempts to force each white neighbor v
// independently; v turns blue iff at least one incident attempt succeeds.
// Newly blue vertices only act from the next round. Edge decisions are drawn
// in canonical order (blue u ascending, then white neighbor ascending), one
// draw per blue-white edge regardless of outcome, so a run is a pure function
// of (graph, start, rule, stream).

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pzf/graph.hpp"

namespace pzf {

enum class RuleKind { standard, alternative, classical };

// Standard: q(u) = |N[u] ∩ blue| / deg(u).
// Alternative (on active rounds): q(u) = min(|N[u] ∩ blue| / d_lower, 1).
// The active set is all rounds or none; only this instantiation is specified.
struct RuleSpec {
  RuleKind kind = RuleKind::standard;
  double d_lower = 0.0;
  bool active_all = true;

  static RuleSpec standard() { return {}; }
  static RuleSpec alternative(double d_lower, bool active_all = true) {
    return {RuleKind::alternative, d_lower, active_all};
  }
};

enum class TrialStatus { forced, round_cap };

struct TrialRecord {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint32_t n = 0;
  double p = std::numeric_limits<double>::quiet_NaN();  // NaN serializes as null
  std::string family;
  std::vector<Vertex> start;
  RuleSpec rule;
  TrialStatus status = TrialStatus::round_cap;
  std::optional<std::uint32_t> pt;
  std::vector<std::uint32_t> b_trajectory;
  std::optional<std::vector<std::uint64_t>> e_blue_trajectory;
  std::optional<std::vector<std::uint32_t>> w_deg_trajectory;
  std::map<std::string, std::uint32_t> crossings;
  bool validity_flag = false;

  std::string to_jsonl() const;  // one JSON object, no trailing newline
};

// Per-white-neighbor forcing probability of u this round, |N[u] ∩ blue| / deg(u).
// The ratio exceeds 1 only when u has no white neighbor, in which case it is
// never used as a probability; returned unclamped.
double force_probability(const Graph& g, const VertexSet& blue, Vertex u);

struct Recording {
  bool blue_edges = false;  // e(Y_{<=i}) per round
  bool white_deg = false;   // max over white v of deg_{Y_i}(v) per round
};

class ForcingProcess {
 public:
  using Recording = pzf::Recording;

  ForcingProcess(const Graph& g, const VertexSet& start, RuleSpec rule, Recording rec = {});

  // One probabilistic round. draw(u, v) must return a uniform [0,1) variate;
  // it is consulted once per blue-white edge in canonical order. Returns the
  // number of active sources (blue vertices with a white neighbor); when that
  // is 0 the round is a no-op and the round counter does not advance, since
  // no extension is ever possible again.
  template <typename DrawFn>
  std::uint32_t probabilistic_round(DrawFn&& draw) {
    if (done()) return 0;
    newly_.reset();
    std::uint32_t sources = 0;
    const bool alt = rule_.kind == RuleKind::alternative && rule_.active_all;
    for (std::size_t ub = blue_.find_first(); ub != VertexSet::npos; ub = blue_.find_next(ub)) {
      const Vertex u = static_cast<Vertex>(ub);
      std::uint32_t wc = white_count_[u];
      if (wc == 0) continue;
      ++sources;
      std::uint32_t du = g_->degree(u);
      std::uint32_t c = 1 + du - wc;  // |N[u] ∩ blue|; u itself plus blue open neighbors
      double q;
      if (alt) {
        q = static_cast<double>(c) / rule_.d_lower;
        // Q̃ < Q happens exactly when d_lower > deg(u) and the min does not clamp.
        if (q < 1.0) {
          if (rule_.d_lower > static_cast<double>(du)) validity_flag_ = true;
        } else {
          q = 1.0;
        }
      } else {
        q = static_cast<double>(c) / static_cast<double>(du);
      }
      for (Vertex v : g_->neighbors(u)) {
        if (blue_.test(v)) continue;  // round-start blue set; commits are deferred
        if (draw(u, v) < q) newly_.set(v);
      }
    }
    if (sources == 0) return 0;
    commit_round();
    return sources;
  }

  // One classical round: every blue u with exactly one white neighbor forces
  // it. Returns the number of new blues; 0 means the process has stalled for
  // good (deterministic rule), and the round counter does not advance.
  std::uint32_t classical_round();

  bool done() const { return blue_count_ == g_->num_vertices(); }
  const VertexSet& blue() const { return blue_; }
  const VertexSet& newly_blue() const { return newly_; }
  std::uint32_t round() const { return round_; }
  std::uint32_t blue_count() const { return blue_count_; }
  bool validity_flag() const { return validity_flag_; }
  std::uint32_t white_neighbor_count(Vertex u) const { return white_count_[u]; }

  const std::vector<std::uint32_t>& b_trajectory() const { return b_traj_; }
  const std::vector<std::uint64_t>& e_blue_trajectory() const { return e_blue_traj_; }
  const std::vector<std::uint32_t>& w_deg_trajectory() const { return w_deg_traj_; }

 private:
  void commit_round();
  void record_white_deg();

  const Graph* g_;
  RuleSpec rule_;
  Recording rec_;
  VertexSet blue_;
  VertexSet newly_;
  std::vector<std::uint32_t> white_count_;  // per vertex: white open neighbors, all vertices
  std::vector<std::uint32_t> scratch_;      // white-degree counting, allocated on demand
  std::uint32_t blue_count_ = 0;
  std::uint32_t round_ = 0;
  std::uint64_t e_blue_ = 0;
  bool validity_flag_ = false;
  std::vector<std::uint32_t> b_traj_;
  std::vector<std::uint64_t> e_blue_traj_;
  std::vector<std::uint32_t> w_deg_traj_;
};

// Far above any predicted propagation time. Named families have no p; they
// propagate in O(n) rounds, so the cap scales linearly there.
std::uint32_t default_max_rounds(std::uint32_t n, double p);

// Runs the probabilistic process from start until all blue or max_rounds.
// A start whose component is already saturated (no blue-white edge) can never
// finish and reports round_cap immediately. thresholds, when supplied, yield
// crossings[name] = first round index with |blue| >= value.
TrialRecord run_process(const Graph& g, const VertexSet& start, const RuleSpec& rule,
                        std::uint64_t seed, std::uint32_t max_rounds,
                        const std::vector<std::pair<std::string, double>>& thresholds = {},
                        Recording rec = {});

struct ShadowResult {
  TrialRecord probabilistic;
  TrialRecord classical;
  bool containment = false;
};

// Probabilistic run plus the deterministic classical sequence from the same
// start, compared each round. The classical blue set is a subset of the
// probabilistic one in every realization: a classical force means its source
// has one white neighbor and a fully blue closed neighborhood otherwise, so
// the probabilistic attempt on that edge succeeds with probability 1.
ShadowResult run_with_shadow(const Graph& g, const VertexSet& start, std::uint64_t seed,
                             std::uint32_t max_rounds);

VertexSet make_vertex_set(Vertex n, const std::vector<Vertex>& verts);
std::vector<Vertex> set_to_vector(const VertexSet& s);

}  // namespace pzf

#endif  // PZF_FORCING_HPP
