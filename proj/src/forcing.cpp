#include "pzf/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "pzf/rng.hpp"

namespace pzf {

double force_probability(const Graph& g, const VertexSet& blue, Vertex u) {
  if (u >= g.num_vertices() || !blue.test(u))
    throw std::invalid_argument("force_probability: u must be blue");
  std::uint32_t du = g.degree(u);
  if (du == 0) throw std::invalid_argument("force_probability: isolated vertex");
  std::uint32_t c = 1;
  for (Vertex v : g.neighbors(u)) c += blue.test(v) ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(du);
}

ForcingProcess::ForcingProcess(const Graph& g, const VertexSet& start, RuleSpec rule, Recording rec)
    : g_(&g), rule_(rule), rec_(rec), blue_(start), newly_(start) {
  Vertex n = g.num_vertices();
  if (start.size() != n) throw std::invalid_argument("forcing: start set size mismatch");
  if (start.none()) throw std::invalid_argument("forcing: empty start set");
  if (rule.kind == RuleKind::alternative && !(rule.d_lower > 0))
    throw std::invalid_argument("forcing: alternative rule needs d_lower > 0");

  white_count_.resize(n);
  for (Vertex u = 0; u < n; ++u) white_count_[u] = g.degree(u);
  for (std::size_t v = blue_.find_first(); v != VertexSet::npos; v = blue_.find_next(v)) {
    ++blue_count_;
    for (Vertex w : g.neighbors(v)) --white_count_[w];
  }
  b_traj_.push_back(blue_count_);
  if (rec_.blue_edges) {
    for (std::size_t v = blue_.find_first(); v != VertexSet::npos; v = blue_.find_next(v))
      e_blue_ += g.degree(v) - white_count_[v];
    e_blue_ /= 2;
    e_blue_traj_.push_back(e_blue_);
  }
  if (rec_.white_deg) {
    scratch_.assign(n, 0);
    record_white_deg();
  }
}

void ForcingProcess::commit_round() {
  for (std::size_t v = newly_.find_first(); v != VertexSet::npos; v = newly_.find_next(v)) {
    blue_.set(v);
    ++blue_count_;
    // At this point white_count_[v] already reflects earlier flips this
    // round, so deg - white_count counts each new blue-blue edge exactly once.
    if (rec_.blue_edges) e_blue_ += g_->degree(v) - white_count_[v];
    for (Vertex w : g_->neighbors(v)) --white_count_[w];
  }
  ++round_;
  b_traj_.push_back(blue_count_);
  if (rec_.blue_edges) e_blue_traj_.push_back(e_blue_);
  if (rec_.white_deg) record_white_deg();
}

void ForcingProcess::record_white_deg() {
  std::uint32_t best = 0;
  for (std::size_t v = newly_.find_first(); v != VertexSet::npos; v = newly_.find_next(v))
    for (Vertex w : g_->neighbors(v))
      if (!blue_.test(w)) best = std::max(best, ++scratch_[w]);
  for (std::size_t v = newly_.find_first(); v != VertexSet::npos; v = newly_.find_next(v))
    for (Vertex w : g_->neighbors(v))
      if (!blue_.test(w)) scratch_[w] = 0;
  w_deg_traj_.push_back(best);
}

std::uint32_t ForcingProcess::classical_round() {
  if (done()) return 0;
  newly_.reset();
  std::uint32_t forces = 0;
  for (std::size_t u = blue_.find_first(); u != VertexSet::npos; u = blue_.find_next(u)) {
    if (white_count_[u] != 1) continue;
    for (Vertex v : g_->neighbors(u)) {
      if (!blue_.test(v)) {
        if (!newly_.test(v)) {
          newly_.set(v);
          ++forces;
        }
        break;
      }
    }
  }
  if (forces == 0) return 0;
  commit_round();
  return forces;
}

std::uint32_t default_max_rounds(std::uint32_t n, double p) {
  double nn = std::max<double>(n, 16);
  double loglog = std::log2(std::log2(nn));
  if (std::isfinite(p) && p > 0) {
    double v = 64.0 * (loglog + std::log2(1.0 / p) + 1.0);
    return static_cast<std::uint32_t>(std::ceil(v));
  }
  return 4 * n + 64;
}

namespace {

void fill_crossings(TrialRecord& rec, const std::vector<std::pair<std::string, double>>& thresholds) {
  for (const auto& [name, value] : thresholds) {
    for (std::uint32_t i = 0; i < rec.b_trajectory.size(); ++i) {
      if (static_cast<double>(rec.b_trajectory[i]) >= value) {
        rec.crossings[name] = i;
        break;
      }
    }
  }
}

TrialRecord snapshot(const ForcingProcess& proc, const Graph& g, const VertexSet& start,
                     const RuleSpec& rule, std::uint64_t seed) {
  TrialRecord rec;
  rec.seed = seed;
  rec.n = g.num_vertices();
  rec.start = set_to_vector(start);
  rec.rule = rule;
  rec.b_trajectory = proc.b_trajectory();
  rec.validity_flag = proc.validity_flag();
  if (proc.done()) {
    rec.status = TrialStatus::forced;
    rec.pt = proc.round();
  } else {
    rec.status = TrialStatus::round_cap;
  }
  if (!proc.e_blue_trajectory().empty()) rec.e_blue_trajectory = proc.e_blue_trajectory();
  if (!proc.w_deg_trajectory().empty()) rec.w_deg_trajectory = proc.w_deg_trajectory();
  return rec;
}

}  // namespace

TrialRecord run_process(const Graph& g, const VertexSet& start, const RuleSpec& rule,
                        std::uint64_t seed, std::uint32_t max_rounds,
                        const std::vector<std::pair<std::string, double>>& thresholds,
                        ForcingProcess::Recording rec) {
  if (max_rounds < 1) throw std::invalid_argument("run_process: max_rounds must be >= 1");
  if (rule.kind == RuleKind::classical)
    throw std::invalid_argument("run_process: classical runs come from run_with_shadow");
  ForcingProcess proc(g, start, rule, rec);
  Rng rng(seed);
  auto draw = [&](Vertex, Vertex) { return rng.uniform01(); };
  while (!proc.done() && proc.round() < max_rounds) {
    if (proc.probabilistic_round(draw) == 0) break;  // saturated component, hopeless
  }
  TrialRecord out = snapshot(proc, g, start, rule, seed);
  fill_crossings(out, thresholds);
  return out;
}

ShadowResult run_with_shadow(const Graph& g, const VertexSet& start, std::uint64_t seed,
                             std::uint32_t max_rounds) {
  ForcingProcess prob(g, start, RuleSpec::standard());
  ForcingProcess clas(g, start, RuleSpec::standard());
  Rng rng(seed);
  auto draw = [&](Vertex, Vertex) { return rng.uniform01(); };

  ShadowResult res;
  res.containment = clas.blue().is_subset_of(prob.blue());
  bool prob_live = !prob.done();
  bool clas_live = !clas.done();
  while ((prob_live || clas_live) && res.containment) {
    if (prob_live && prob.round() < max_rounds) {
      if (prob.probabilistic_round(draw) == 0 || prob.done()) prob_live = false;
    } else {
      prob_live = false;
    }
    if (clas_live && clas.round() < max_rounds) {
      if (clas.classical_round() == 0 || clas.done()) clas_live = false;
    } else {
      clas_live = false;
    }
    res.containment = clas.blue().is_subset_of(prob.blue());
  }

  res.probabilistic = snapshot(prob, g, start, RuleSpec::standard(), seed);
  res.classical = snapshot(clas, g, start, RuleSpec{RuleKind::classical, 0.0, true}, seed);
  return res;
}

VertexSet make_vertex_set(Vertex n, const std::vector<Vertex>& verts) {
  VertexSet s(n);
  for (Vertex v : verts) {
    if (v >= n) throw std::invalid_argument("vertex out of range");
    s.set(v);
  }
  return s;
}

std::vector<Vertex> set_to_vector(const VertexSet& s) {
  std::vector<Vertex> out;
  out.reserve(s.count());
  for (std::size_t v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    out.push_back(static_cast<Vertex>(v));
  return out;
}

std::string TrialRecord::to_jsonl() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["trial"] = trial;
  j["n"] = n;
  if (std::isfinite(p))
    j["p"] = p;
  else
    j["p"] = nullptr;
  j["family"] = family;
  j["start"] = start;
  switch (rule.kind) {
    case RuleKind::standard:
      j["rule"] = "standard";
      break;
    case RuleKind::classical:
      j["rule"] = "classical";
      break;
    case RuleKind::alternative:
      j["rule"] = {{"kind", "alternative"},
                   {"d_lower", rule.d_lower},
                   {"active", rule.active_all ? "all" : "none"}};
      j["validity_flag"] = validity_flag;
      break;
  }
  j["status"] = status == TrialStatus::forced ? "forced" : "round_cap";
  if (pt)
    j["pt"] = *pt;
  else
    j["pt"] = nullptr;
  j["b_trajectory"] = b_trajectory;
  if (e_blue_trajectory) j["e_blue_trajectory"] = *e_blue_trajectory;
  if (w_deg_trajectory) j["w_deg_trajectory"] = *w_deg_trajectory;
  j["crossings"] = crossings;
  return j.dump();
}

}  // namespace pzf
