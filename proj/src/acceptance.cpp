#include "pzf/acceptance.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pzf/bounds.hpp"
#include "pzf/coupling.hpp"
#include "pzf/exact.hpp"
#include "pzf/forcing.hpp"
#include "pzf/graph.hpp"
#include "pzf/montecarlo.hpp"
#include "pzf/rng.hpp"

namespace pzf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Ctx {
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::ostringstream detail;
  bool pass = true;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAIL: " << what << "; ";
    }
  }
  void note(const std::string& what) { detail << what << "; "; }
};

double log2log2(double n) { return std::log2(std::log2(n)); }

// 1. Exact golden expectations, rational equality, under a second each.
void c1(Ctx& c) {
  const struct {
    const char* family;
    Vertex n;
    long num, den;
  } golden[] = {{"path", 3, 2, 1},  {"path", 4, 8, 3},  {"path", 5, 3, 1},
                {"cycle", 4, 7, 3}, {"cycle", 5, 3, 1}, {"cycle", 6, 10, 3}};
  for (const auto& gcase : golden) {
    const auto t0 = Clock::now();
    const Graph g = named_graph(gcase.family, gcase.n);
    const auto [v, value] = min_expected_propagation_time(g);
    const double dt = seconds_since(t0);
    const Rational want = make_rational(gcase.num, gcase.den);
    std::ostringstream name;
    name << gcase.family << "(" << gcase.n << ")";
    c.require(value == want, name.str() + " expected " + rational_str(want) + " got " + rational_str(value));
    c.require(dt < 1.0, name.str() + " took " + format_double(dt) + "s (budget 1s)");
    c.note(name.str() + "=" + rational_str(value) + " at vertex " + std::to_string(v));
  }
}

// 2. Monte Carlo mean against the exact 8/3 on path(4), min-singleton starts.
void c2(Ctx& c) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.family = "path";
  cfg.n = 4;
  cfg.start = StartPolicy::min_singleton();
  cfg.trials = 1000000;
  cfg.master_seed = c.seed;
  const Graph g = build_graph(cfg);

  StatsCollector collector;
  run_trials(cfg, g, [&](const TrialRecord& r) { collector.add(r); });
  const SummaryStats s = collector.finish();
  const double dt = seconds_since(t0);

  const double want = 8.0 / 3.0;
  c.require(s.cap_hits == 0, "cap hits: " + std::to_string(s.cap_hits));
  c.require(s.se_defined, "standard error undefined");
  const double dev = std::abs(s.mean - want) / s.se;
  // The pinned target is 8/3, the smallest per-start expectation. The policy
  // under test records the minimum of four independent runs, and on path(4)
  // that minimum is 2 with probability 3/4 (either inner start finishes in two
  // rounds half the time; endpoints always take three) and 3 otherwise, so its
  // expectation is exactly 9/4. The two quantities differ by 5/12, hundreds of
  // standard errors at this trial count. Reported, not patched.
  c.require(dev <= 4.0, "mean " + format_double(s.mean) + " is " + format_double(dev) +
                            " standard errors from the target 8/3 (limit 4); the recorded "
                            "statistic is the minimum over four independent starts, whose "
                            "expectation here is exactly 9/4");
  c.require(dt < 60.0, "took " + format_double(dt) + "s (budget 60s)");
  c.note("mean=" + format_double(s.mean) + " se=" + format_double(s.se) + " dev=" +
         format_double(dev) + "se t=" + format_double(dt) + "s");
}

// 3. Pathwise containment: subset coupling, alternative coupling with a valid
// degree lower bound, and the classical shadow, 1000 seeded runs each.
void c3(Ctx& c) {
  const auto t0 = Clock::now();
  const Graph g = sample_gnp(200, 0.1, derive_seed(c.seed ^ SEED_DOMAIN_GRAPH, 0));
  const std::uint32_t maxr = default_max_rounds(200, 0.1);

  VertexSet s1(200), s2(200);
  s1.set(0);
  s2.set(0);
  s2.set(1);
  int subset_ok = 0;
  for (std::uint32_t k = 0; k < 1000; ++k)
    subset_ok += coupled_run_subset(g, s1, s2, maxr, derive_seed(c.seed, k)).containment;
  c.require(subset_ok == 1000, "subset containment " + std::to_string(subset_ok) + "/1000");

  // d_lower at the realized minimum degree keeps the alternative rule valid,
  // which is what the containment guarantee is conditioned on.
  std::uint32_t min_deg = g.degree(0);
  for (Vertex v = 1; v < g.num_vertices(); ++v) min_deg = std::min(min_deg, g.degree(v));
  const RuleSpec alt = RuleSpec::alternative(std::max<std::uint32_t>(min_deg, 1));
  int alt_ok = 0, alt_flags = 0;
  for (std::uint32_t k = 0; k < 1000; ++k) {
    const CoupledResult r = coupled_run_alternative(g, s1, alt, maxr, derive_seed(c.seed, 10000 + k));
    alt_ok += r.containment;
    alt_flags += r.validity_violation;
  }
  c.require(alt_ok == 1000, "alternative containment " + std::to_string(alt_ok) + "/1000");
  c.require(alt_flags == 0, "validity flags raised with d_lower = min degree");

  const Graph p50 = named_graph("path", 50);
  VertexSet sp(50);
  sp.set(0);
  int shadow_path = 0, shadow_gnp = 0;
  for (std::uint32_t k = 0; k < 1000; ++k) {
    shadow_path += run_with_shadow(p50, sp, derive_seed(c.seed, 20000 + k), default_max_rounds(50, std::nan(""))).containment;
    shadow_gnp += run_with_shadow(g, s1, derive_seed(c.seed, 30000 + k), maxr).containment;
  }
  c.require(shadow_path == 1000, "shadow containment on path(50) " + std::to_string(shadow_path) + "/1000");
  c.require(shadow_gnp == 1000, "shadow containment on gnp " + std::to_string(shadow_gnp) + "/1000");

  const double dt = seconds_since(t0);
  c.require(dt < 60.0, "took " + format_double(dt) + "s (budget 60s)");
  c.note("subset=" + std::to_string(subset_ok) + " alt=" + std::to_string(alt_ok) + " shadow=" +
         std::to_string(shadow_path) + "+" + std::to_string(shadow_gnp) + " d_lower=" +
         std::to_string(min_deg) + " t=" + format_double(dt) + "s");
}

// 4. Engine one-round law equals the exact transition distribution on every
// proper state of path(4) and cycle(4), 1e5 samples per state, 5 SE per
// outcome; probability-0/1 outcomes must be missed/hit exactly.
void c4(Ctx& c) {
  const std::uint32_t samples = 100000;
  int graph_tag = 0;
  for (const char* family : {"path", "cycle"}) {
    const Graph g = named_graph(family, 4);
    for (StateMask m = 1; m + 1 < (1u << 4); ++m) {
      const TransitionDistribution exact = transition_distribution_mask(g, m);
      VertexSet start(4);
      for (Vertex v = 0; v < 4; ++v)
        if (m & (1u << v)) start.set(v);

      std::map<StateMask, std::uint64_t> counts;
      Rng rng(derive_seed(c.seed, 40000 + graph_tag * 64 + m));
      auto draw = [&](Vertex, Vertex) { return rng.uniform01(); };
      for (std::uint32_t k = 0; k < samples; ++k) {
        ForcingProcess proc(g, start, RuleSpec::standard());
        proc.probabilistic_round(draw);
        ++counts[mask_of(proc.blue())];
      }

      for (const auto& [succ, cnt] : counts) {
        const bool known = std::any_of(exact.entries.begin(), exact.entries.end(),
                                       [&](const auto& e) { return e.first == succ; });
        c.require(known, std::string(family) + "(4) state " + std::to_string(m) +
                             ": impossible successor " + std::to_string(succ) + " observed");
      }
      for (const auto& [succ, prob] : exact.entries) {
        const double pi = prob.get_d();
        const double freq =
            static_cast<double>(counts.count(succ) ? counts[succ] : 0) / samples;
        const double se = std::sqrt(pi * (1.0 - pi) / samples);
        const double tol = 5.0 * se;
        if (std::abs(freq - pi) > tol) {
          std::ostringstream what;
          what << family << "(4) state " << m << " -> " << succ << ": freq " << freq
               << " vs exact " << pi << " (tol " << tol << ")";
          c.require(false, what.str());
        }
      }
    }
    ++graph_tag;
  }
  c.note("28 states x 100000 samples matched");
}

void write_summary(const Ctx& c, const std::string& name, const std::vector<CellResult>& rows) {
  std::ofstream out(c.out / name);
  out << summary_csv_header() << "\n";
  for (const auto& r : rows) out << summary_csv_row(r.config, r.stats, r.bounds, r.error) << "\n";
}

// 5. Dense-regime medians: nondecreasing in n and inside the pinned envelope.
void c5(Ctx& c) {
  const auto t0 = Clock::now();
  ExperimentConfig tmpl;
  tmpl.family = "gnp";
  tmpl.start = StartPolicy::fixed({0});
  tmpl.trials = 100;
  tmpl.master_seed = c.seed;
  const std::vector<SweepCell> grid = {{1024, 0.25}, {4096, 0.25}, {16384, 0.25}};
  const std::vector<CellResult> rows = sweep(tmpl, grid);
  write_summary(c, "dense_sweep.csv", rows);

  double prev_median = 0;
  for (const auto& row : rows) {
    const std::string cell = "n=" + std::to_string(row.config.n);
    c.require(row.error.empty(), cell + " failed: " + row.error);
    if (!row.error.empty()) continue;
    c.require(row.stats.cap_hits == 0, cell + " cap hits " + std::to_string(row.stats.cap_hits));
    c.require(!row.stats.empty, cell + " has no forced records");
    if (row.stats.empty) continue;
    const double ll = log2log2(static_cast<double>(row.config.n));
    const double lo = std::max(1.0, ll - 2.0);
    const double hi = 3.0 * (ll + std::log(1.0 / 0.25) / std::log(3.0)) + 2.0;
    c.require(row.stats.median >= lo && row.stats.median <= hi,
              cell + " median " + format_double(row.stats.median) + " outside [" +
                  format_double(lo) + ", " + format_double(hi) + "]");
    c.require(row.stats.median >= prev_median,
              cell + " median " + format_double(row.stats.median) + " decreased from " +
                  format_double(prev_median));
    c.note(cell + " median=" + format_double(row.stats.median));
    prev_median = row.stats.median;
  }
  const double dt = seconds_since(t0);
  c.require(dt < 600.0, "took " + format_double(dt) + "s (budget 600s)");
  c.note("t=" + format_double(dt) + "s");
}

// 6. Sparse-regime medians: increase with 1/p, slope against ln(1/p) inside
// the generous log4/log3 envelope.
void c6(Ctx& c) {
  const auto t0 = Clock::now();
  const double n = 100000;
  ExperimentConfig tmpl;
  tmpl.family = "gnp";
  tmpl.start = StartPolicy::fixed({0});
  tmpl.trials = 50;
  tmpl.master_seed = c.seed;
  std::vector<SweepCell> grid;
  for (double expo : {-0.3, -0.4, -0.5})
    grid.push_back({static_cast<Vertex>(n), std::pow(n, expo)});
  const std::vector<CellResult> rows = sweep(tmpl, grid);
  write_summary(c, "sparse_sweep.csv", rows);

  std::vector<double> medians;
  for (const auto& row : rows) {
    const std::string cell = "p=" + format_double(row.config.p);
    c.require(row.error.empty(), cell + " failed: " + row.error);
    if (!row.error.empty()) continue;
    c.require(row.stats.cap_hits == 0, cell + " cap hits " + std::to_string(row.stats.cap_hits));
    c.require(!row.stats.empty, cell + " has no forced records");
    if (!row.stats.empty) {
      medians.push_back(row.stats.median);
      c.note(cell + " median=" + format_double(row.stats.median));
    }
  }
  if (medians.size() == rows.size()) {
    // "Increases with 1/p" over the grid: never decreasing, and strictly
    // higher at the far end. Grid order is ascending 1/p.
    bool nondecreasing = true;
    for (std::size_t i = 0; i + 1 < medians.size(); ++i)
      nondecreasing = nondecreasing && medians[i + 1] >= medians[i];
    c.require(nondecreasing && medians.back() > medians.front(),
              "medians do not increase with 1/p");
    const FitResult fit = fit_growth(rows, GrowthModel::log_inv_p);
    const double lo = 0.5 / std::log(4.0), hi = 2.0 / std::log(3.0);
    c.require(fit.slope >= lo && fit.slope <= hi,
              "slope " + format_double(fit.slope) + " outside [" + format_double(lo) + ", " +
                  format_double(hi) + "]");
    c.note("slope=" + format_double(fit.slope));
  }
  const double dt = seconds_since(t0);
  c.require(dt < 900.0, "took " + format_double(dt) + "s (budget 900s)");
  c.note("t=" + format_double(dt) + "s");
}

// Shared grid for the two exhaustive lemma oracles: all source sets of size
// 1..2 on up to 4 vertices, both rates, both degree bounds.
template <typename VerifyFn>
void oracle_grid(Ctx& c, const char* label, double budget_s, VerifyFn&& verify) {
  const auto t0 = Clock::now();
  const Rational ps[] = {make_rational(1, 4), make_rational(3, 10)};
  const Rational dls[] = {make_rational(2, 1), make_rational(3, 1)};
  std::uint64_t events = 0;
  int configs = 0;
  for (Vertex n = 2; n <= 4; ++n) {
    for (StateMask m = 1; m < (1u << n); ++m) {
      const int k = std::popcount(m);
      if (k > 2 || static_cast<Vertex>(k) >= n) continue;
      std::vector<Vertex> y0;
      for (Vertex v = 0; v < n; ++v)
        if (m & (1u << v)) y0.push_back(v);
      for (const Rational& p : ps) {
        for (const Rational& dl : dls) {
          const OracleReport rep = verify(n, p, y0, dl);
          events += rep.events_checked;
          ++configs;
          if (!rep.pass) {
            std::ostringstream what;
            what << label << " violated: n=" << n << " |y0|=" << k << " p=" << rational_str(p)
                 << " d_lower=" << rational_str(dl) << " worst=" << rational_str(rep.worst_value)
                 << " at " << rep.worst_witness;
            c.require(false, what.str());
          }
          if (!rep.closed_form_match) c.require(false, std::string(label) + ": closed form mismatch");
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  c.require(dt < budget_s, "took " + format_double(dt) + "s (budget " + format_double(budget_s) + "s)");
  c.note(std::to_string(configs) + " configurations, " + std::to_string(events) +
         " conditioning events, t=" + format_double(dt) + "s");
}

void c7(Ctx& c) {
  oracle_grid(c, "edge probability bound", 300.0,
              [](Vertex n, const Rational& p, const std::vector<Vertex>& y0, const Rational& dl) {
                return verify_lemma_edge_probability(n, p, y0, dl);
              });
}

void c8(Ctx& c) {
  oracle_grid(c, "edge count domination", 300.0,
              [](Vertex n, const Rational& p, const std::vector<Vertex>& y0, const Rational& dl) {
                return verify_edge_count_domination(n, p, y0, dl);
              });
}

// 9. Eta recursion: envelope claim plus monotone convergence to the fixed
// point. The envelope check fails at j=3 for every admissible parameter
// point: eta_j stays under 2*add iff 1 + r + ... + r^{j-1} <= 2 with
// r = 3/4 + eps/2 >= 3/4, and 1 + r + r^2 >= 2.3125. Reported, not patched.
void c9(Ctx& c) {
  const std::pair<double, double> pc1[] = {{1e-6, 0.9}, {1e-8, 0.7}, {1e-10, 0.6}, {1e-12, 0.55}};
  for (const auto& [p, c1v] : pc1) {
    for (const double c2v : {0.95, 0.99}) {
      const EtaSequence s = eta_sequence(p, c1v, c2v, 100);
      std::ostringstream tag;
      tag << "(p=" << p << ", c1=" << c1v << ", c2=" << c2v << ")";
      c.require(s.eps < 0.5, tag.str() + " eps >= 1/2, outside the admissible range");
      if (s.first_envelope_violation) {
        c.require(false, tag.str() + " eta_" + std::to_string(*s.first_envelope_violation) +
                             "=" + format_double(s.values[*s.first_envelope_violation]) +
                             " exceeds envelope " + format_double(s.envelope));
      }
      c.require(s.fixed_point.has_value(), tag.str() + " no fixed point");
      if (!s.fixed_point) continue;
      const double fp = *s.fixed_point;
      bool monotone = true;
      for (std::size_t j = 0; j + 1 < s.values.size(); ++j)
        monotone = monotone && s.values[j + 1] + 4e-15 * fp >= s.values[j];
      c.require(monotone, tag.str() + " sequence not monotone");
      const double rel = std::abs(s.values.back() - fp) / fp;
      c.require(rel <= 1e-12, tag.str() + " relative error " + format_double(rel) + " > 1e-12");
    }
  }
  c.note("violation at j=3 is forced by the recursion constants; convergence clause passes");
}

// 10. Expansion audit across 20 sampled graphs.
void c10(Ctx& c) {
  const auto t0 = Clock::now();
  const Vertex n = 20000;
  const double d = 20.0 * std::log(static_cast<double>(n));
  const double p = d / (n - 1.0);
  const double omega = 20.0;
  ExpansionOptions opts;
  opts.d = d;
  opts.degree_tolerance = 3.0 * std::sqrt(std::log(static_cast<double>(n)) / d);
  opts.set_tolerance = 5.0 / std::sqrt(omega);

  int full_pass = 0;
  for (std::uint32_t s = 0; s < 20; ++s) {
    const Graph g = sample_gnp(n, p, derive_seed(c.seed, 50000 + s));
    const ExpansionReport rep = check_expansion(g, omega, 100, derive_seed(c.seed, 60000 + s), opts);
    full_pass += rep.all_ok;
  }
  const double dt = seconds_since(t0);
  c.require(full_pass >= 19, std::to_string(full_pass) + "/20 graphs passed (need 19)");
  c.require(dt < 300.0, "took " + format_double(dt) + "s (budget 300s)");
  c.note(std::to_string(full_pass) + "/20 passed, deg_tol=" + format_double(opts.degree_tolerance) +
         " set_tol=" + format_double(opts.set_tolerance) + " t=" + format_double(dt) + "s");
}

// 11. Byte identity of JSONL streams across repeated runs and worker counts.
void c11(Ctx& c) {
  auto jsonl_of = [](const ExperimentConfig& cfg) {
    const Graph g = build_graph(cfg);
    std::string out;
    run_trials(cfg, g, [&](const TrialRecord& r) {
      out += r.to_jsonl();
      out += '\n';
    });
    return out;
  };

  ExperimentConfig mc;
  mc.family = "path";
  mc.n = 4;
  mc.start = StartPolicy::min_singleton();
  mc.trials = 2000;
  mc.master_seed = c.seed;
  const std::string run1 = jsonl_of(mc);
  const std::string run2 = jsonl_of(mc);
  c.require(run1 == run2, "repeated path(4) runs differ");

  ExperimentConfig gnp;
  gnp.family = "gnp";
  gnp.n = 200;
  gnp.p = 0.1;
  gnp.trials = 50;
  gnp.master_seed = c.seed;
  gnp.record_blue_edges = true;
  gnp.thresholds_omega = 10.0;
  const std::string serial = jsonl_of(gnp);
  gnp.workers = 3;
  const std::string parallel = jsonl_of(gnp);
  c.require(serial == parallel, "worker count changed the record stream");

  const Graph g = sample_gnp(200, 0.1, derive_seed(c.seed ^ SEED_DOMAIN_GRAPH, 0));
  VertexSet s1(200), s2(200);
  s1.set(0);
  s2.set(0);
  s2.set(1);
  auto couple_lines = [&] {
    std::string out;
    for (std::uint32_t k = 0; k < 100; ++k) {
      out += coupled_jsonl_line(k, coupled_run_subset(g, s1, s2, 300, derive_seed(c.seed, 77000 + k)));
      out += '\n';
    }
    return out;
  };
  const std::string cpl1 = couple_lines();
  const std::string cpl2 = couple_lines();
  c.require(cpl1 == cpl2, "repeated coupled runs differ");

  std::ofstream(c.out / "determinism_run1.jsonl") << run1;
  std::ofstream(c.out / "determinism_run2.jsonl") << run2;
  std::ofstream(c.out / "determinism_workers1.jsonl") << serial;
  std::ofstream(c.out / "determinism_workers3.jsonl") << parallel;
  c.note("mc bytes=" + std::to_string(run1.size()) + " coupled bytes=" + std::to_string(cpl1.size()));
}

const char* criterion_name(int id) {
  switch (id) {
    case 1: return "exact golden values";
    case 2: return "mc mean vs exact on path(4)";
    case 3: return "coupling containment invariants";
    case 4: return "one-step law equivalence";
    case 5: return "dense-regime trend";
    case 6: return "sparse-regime trend";
    case 7: return "edge probability oracle";
    case 8: return "edge count domination oracle";
    case 9: return "eta recursion envelope";
    case 10: return "expansion audit";
    case 11: return "determinism";
    default: return "unknown";
  }
}

}  // namespace

std::vector<int> acceptance_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}; }

CriterionResult run_acceptance_criterion(int id, std::uint64_t seed, const std::string& out_dir) {
  Ctx c;
  c.seed = seed;
  c.out = out_dir;
  std::filesystem::create_directories(c.out);

  CriterionResult res;
  res.id = id;
  res.name = criterion_name(id);
  const auto t0 = Clock::now();
  try {
    switch (id) {
      case 1: c1(c); break;
      case 2: c2(c); break;
      case 3: c3(c); break;
      case 4: c4(c); break;
      case 5: c5(c); break;
      case 6: c6(c); break;
      case 7: c7(c); break;
      case 8: c8(c); break;
      case 9: c9(c); break;
      case 10: c10(c); break;
      case 11: c11(c); break;
      default:
        c.require(false, "unknown criterion id " + std::to_string(id));
    }
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  res.pass = c.pass;
  res.seconds = seconds_since(t0);
  res.detail = c.detail.str();
  return res;
}

int run_acceptance(std::vector<int> ids, std::uint64_t seed, const std::string& out_dir,
                   std::ostream& log) {
  if (ids.empty()) ids = acceptance_ids();
  std::sort(ids.begin(), ids.end());
  int failures = 0;
  for (int id : ids) {
    const CriterionResult r = run_acceptance_criterion(id, seed, out_dir);
    failures += !r.pass;
    log << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << r.id << " (" << r.name << ", "
        << format_double(r.seconds) << "s): " << r.detail << "\n";
  }
  log << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
      << "\n";
  return failures;
}

}  // namespace pzf
