// pzf: experiment driver for probabilistic zero forcing on graphs.
//
// Subcommands: sample, exact, run, sweep, couple, expansion, bounds, oracle,
// verify, plotdata. Exit 0 on success, 1 on invalid input, 2 when a
// verification command (verify, oracle) finds failures.
//
// Precedence: --config supplies the base experiment configuration, explicit
// flags override individual fields. --seed defaults to 1 everywhere except
// `verify`, which refuses to run without one.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pzf/acceptance.hpp"
#include "pzf/bounds.hpp"
#include "pzf/coupling.hpp"
#include "pzf/exact.hpp"
#include "pzf/forcing.hpp"
#include "pzf/graph.hpp"
#include "pzf/montecarlo.hpp"
#include "pzf/rng.hpp"

namespace {

using namespace pzf;
namespace fs = std::filesystem;

std::vector<Vertex> parse_vertex_list(const std::string& text) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (piece.empty()) continue;
    out.push_back(static_cast<Vertex>(std::stoul(piece)));
  }
  if (out.empty()) throw std::invalid_argument("empty vertex list: '" + text + "'");
  return out;
}

StartPolicy parse_start(const std::string& text) {
  if (text == "min") return StartPolicy::min_singleton();
  return StartPolicy::fixed(parse_vertex_list(text));
}

VertexSet make_set(Vertex n, const std::vector<Vertex>& vs) {
  VertexSet s(n);
  for (Vertex v : vs) {
    if (v >= n) throw std::invalid_argument("vertex " + std::to_string(v) + " out of range");
    s.set(v);
  }
  return s;
}

struct WallClock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::uint64_t ms() const {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::steady_clock::now() - t0)
                                          .count());
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command, const ExperimentConfig& cfg,
                    const Graph& g, const SummaryStats* stats, std::uint64_t wall_ms,
                    const std::vector<std::pair<std::string, std::string>>& outputs) {
  write_text(dir / "manifest.json", make_manifest(command, cfg, g, stats, wall_ms, outputs).dump(2) + "\n");
}

// Fields of cfg named by flags the user actually passed win over the config
// file; everything else keeps the file's (or default) value.
struct ConfigFlags {
  CLI::App* sub = nullptr;
  std::string config_path;
  std::string family = "path";
  Vertex n = 0;
  double p = std::nan("");
  std::string graph_file;
  std::string start = "0";
  std::uint64_t seed = 1;
  std::uint64_t trials = 1;
  std::uint32_t max_rounds = 0;
  std::uint32_t workers = 1;
  std::string rule = "standard";
  double dlower = 0.0;
  std::string active = "all";
  double omega = 0.0;

  void add_common(CLI::App* s, bool with_trials = true) {
    sub = s;
    s->add_option("--config", config_path, "experiment config JSON; flags override its fields");
    s->add_option("--family", family, "graph family: path, cycle, star, complete, gnp, file");
    s->add_option("--n", n, "number of vertices");
    s->add_option("--p", p, "edge probability for gnp");
    s->add_option("--graph-file", graph_file, "edge list file (family 'file')");
    s->add_option("--start", start, "start vertices 'v0,v1,...' or 'min'");
    s->add_option("--seed", seed, "master seed (default 1; no wall-clock seeding)");
    if (with_trials) s->add_option("--trials", trials, "number of trials");
    s->add_option("--max-rounds", max_rounds, "round cap (0 = default cap)");
    s->add_option("--workers", workers, "concurrent trial workers; output identical for any value");
    s->add_option("--rule", rule, "forcing rule: standard or alternative (classical runs via couple shadow)");
    s->add_option("--dlower", dlower, "degree lower bound for the alternative rule");
    s->add_option("--active", active, "alternative rule active rounds: all or none");
    s->add_option("--omega", omega, "threshold scale; records phase crossings when set");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--family")) cfg.family = family;
    if (given("--n")) cfg.n = n;
    if (given("--p")) cfg.p = p;
    if (given("--graph-file")) {
      cfg.graph_file = graph_file;
      if (!given("--family")) cfg.family = "file";
    }
    if (given("--start")) cfg.start = parse_start(start);
    if (given("--seed")) cfg.master_seed = seed;
    if (sub->get_option_no_throw("--trials") && given("--trials")) cfg.trials = trials;
    if (given("--max-rounds")) {
      if (max_rounds == 0)
        cfg.max_rounds.reset();
      else
        cfg.max_rounds = max_rounds;
    }
    if (given("--workers")) cfg.workers = workers;
    if (given("--rule") || given("--dlower") || given("--active")) {
      if (rule == "standard" && !given("--dlower"))
        cfg.rule = RuleSpec::standard();
      else if (rule == "classical")
        cfg.rule = RuleSpec{RuleKind::classical, 0.0, true};
      else
        cfg.rule = RuleSpec::alternative(dlower, active != "none");
    }
    if (given("--omega")) cfg.thresholds_omega = omega;
    return cfg;
  }
};

int cmd_sample(const ConfigFlags& f, const std::string& out_dir) {
  WallClock wall;
  ExperimentConfig cfg = f.resolve();
  const Graph g = build_graph(cfg);
  fs::create_directories(out_dir);
  const fs::path edges = fs::path(out_dir) / "graph.edges";
  write_edge_list_file(g, edges.string());
  write_manifest(out_dir, "sample", cfg, g, nullptr, wall.ms(), {{"edges", edges.string()}});
  std::cout << "n=" << g.num_vertices() << " m=" << g.num_edges()
            << " mode=" << sampler_mode(cfg) << " wrote " << edges.string() << "\n";
  return 0;
}

int cmd_exact(const ConfigFlags& f, Vertex cap) {
  ExperimentConfig cfg = f.resolve();
  const Graph g = build_graph(cfg);
  if (cfg.start.kind == StartKind::fixed_set && f.sub->count("--start") > 0) {
    const Rational e = expected_propagation_time(g, make_set(g.num_vertices(), cfg.start.set), cap);
    std::cout << rational_str(e) << "\n";
    return 0;
  }
  const auto [v, e] = min_expected_propagation_time(g, cap);
  std::cout << rational_str(e) << " (vertex " << v << ")\n";
  return 0;
}

int cmd_run(const ConfigFlags& f, const std::string& out_dir) {
  WallClock wall;
  ExperimentConfig cfg = f.resolve();
  const Graph g = build_graph(cfg);
  fs::create_directories(out_dir);
  const fs::path records = fs::path(out_dir) / "records.jsonl";
  const fs::path summary = fs::path(out_dir) / "summary.csv";

  std::ofstream rec_out(records);
  if (!rec_out) throw std::runtime_error("cannot open for writing: " + records.string());
  StatsCollector collector;
  run_trials(cfg, g, [&](const TrialRecord& r) {
    rec_out << r.to_jsonl() << "\n";
    collector.add(r);
  });
  const SummaryStats stats = collector.finish();

  std::optional<BoundPrediction> bounds;
  if (cfg.family == "gnp" && g.num_vertices() >= 16) bounds = predict_bounds(g.num_vertices(), cfg.p);
  write_text(summary, summary_csv_header() + "\n" + summary_csv_row(cfg, stats, bounds, "") + "\n");
  write_manifest(out_dir, "run", cfg, g, &stats, wall.ms(),
                 {{"records", records.string()}, {"summary", summary.string()}});

  std::cout << "trials=" << cfg.trials << " forced=" << stats.count << " cap_hits=" << stats.cap_hits;
  if (!stats.empty)
    std::cout << " mean=" << format_double(stats.mean) << " median=" << format_double(stats.median);
  std::cout << "\n";
  return 0;
}

int cmd_sweep(const ConfigFlags& f, const std::vector<Vertex>& ns, const std::vector<double>& ps,
              const std::string& out_dir) {
  WallClock wall;
  ExperimentConfig tmpl = f.resolve();
  if (ns.empty()) throw std::invalid_argument("sweep: --n list must be nonempty");
  std::vector<SweepCell> grid;
  for (Vertex n : ns) {
    if (ps.empty())
      grid.push_back({n, std::nan("")});
    else
      for (double p : ps) grid.push_back({n, p});
  }

  const std::vector<CellResult> rows = sweep(tmpl, grid);
  fs::create_directories(out_dir);
  const fs::path table = fs::path(out_dir) / "sweep.csv";
  std::string csv = summary_csv_header() + "\n";
  for (const auto& r : rows) csv += summary_csv_row(r.config, r.stats, r.bounds, r.error) + "\n";
  write_text(table, csv);
  // Manifest echoes the template; the per-cell configs are in the table.
  write_manifest(out_dir, "sweep", tmpl, Graph(), nullptr, wall.ms(), {{"table", table.string()}});
  std::cout << csv;
  for (const auto& r : rows)
    if (!r.error.empty()) std::cerr << "cell n=" << r.config.n << " failed: " << r.error << "\n";
  return 0;
}

int cmd_couple(const std::string& mode, const ConfigFlags& f, const std::string& s1_text,
               const std::string& s2_text, const std::string& target_text, std::uint32_t rounds,
               const std::string& out_dir) {
  WallClock wall;
  ExperimentConfig cfg = f.resolve();
  const Graph g = build_graph(cfg);
  const Vertex n = g.num_vertices();
  const std::uint32_t maxr = rounds ? rounds : default_max_rounds(n, cfg.p);
  const std::uint64_t trials = cfg.trials;

  fs::create_directories(out_dir);
  const fs::path jsonl = fs::path(out_dir) / ("couple_" + mode + ".jsonl");
  const fs::path verdicts = fs::path(out_dir) / ("couple_" + mode + ".csv");

  if (mode == "event") {
    const VertexSet start = make_set(n, parse_vertex_list(s1_text));
    const VertexSet target =
        target_text == "all" ? [&] { VertexSet t(n); t.set(); return t; }()
                             : make_set(n, parse_vertex_list(target_text));
    const EventEstimate est = estimate_force_event_probability(
        g, start, target, maxr, static_cast<std::uint32_t>(trials), cfg.master_seed);
    std::cout << "estimate=" << format_double(est.estimate) << " se=" << format_double(est.se)
              << " successes=" << est.successes << "/" << est.trials << "\n";
    return 0;
  }

  std::ofstream jl(jsonl);
  std::ofstream vc(verdicts);
  vc << coupled_csv_header() << "\n";
  std::uint64_t contained = 0, validity_flags = 0;
  for (std::uint64_t k = 0; k < trials; ++k) {
    const std::uint64_t seed_k = derive_seed(cfg.master_seed, k);
    CoupledResult r;
    if (mode == "subset") {
      r = coupled_run_subset(g, make_set(n, parse_vertex_list(s1_text)),
                             make_set(n, parse_vertex_list(s2_text)), maxr, seed_k);
    } else if (mode == "alternative") {
      if (cfg.rule.kind != RuleKind::alternative)
        throw std::invalid_argument("couple alternative: pass --dlower (and optionally --active)");
      r = coupled_run_alternative(g, make_set(n, parse_vertex_list(s1_text)), cfg.rule, maxr, seed_k);
    } else {  // shadow: classical sequence inside the probabilistic run
      const ShadowResult s = run_with_shadow(g, make_set(n, parse_vertex_list(s1_text)), seed_k, maxr);
      r.containment = s.containment;
      r.validity_violation = false;
      auto pt_str = [](const std::optional<std::uint32_t>& v) {
        return v ? std::to_string(*v) : std::string("null");
      };
      jl << "{\"seed\":" << seed_k << ",\"pt\":" << pt_str(s.probabilistic.pt)
         << ",\"pt_classical\":" << pt_str(s.classical.pt) << ",\"containment\":"
         << (s.containment ? "true" : "false") << "}\n";
      vc << seed_k << ",," << (s.containment ? "true" : "false") << ",,false\n";
      contained += s.containment;
      continue;
    }
    jl << coupled_jsonl_line(seed_k, r) << "\n";
    vc << coupled_csv_row(seed_k, r) << "\n";
    contained += r.containment;
    validity_flags += r.validity_violation;
  }
  write_manifest(out_dir, "couple " + mode, cfg, g, nullptr, wall.ms(),
                 {{"jsonl", jsonl.string()}, {"verdicts", verdicts.string()}});
  std::cout << "containment: " << contained << "/" << trials << "\n";
  if (validity_flags > 0)
    std::cout << "validity violations: " << validity_flags << "/" << trials
              << " (d_lower exceeds a realized degree; containment not guaranteed)\n";
  return 0;
}

int cmd_expansion(const ConfigFlags& f, std::uint32_t samples, double d, double deg_tol,
                  double set_tol, const std::string& out_dir) {
  WallClock wall;
  ExperimentConfig cfg = f.resolve();
  const Graph g = build_graph(cfg);
  const double omega = f.omega > 1.0 ? f.omega : 2.0;

  ExpansionOptions opts;
  opts.d = d > 0 ? d : g.mean_degree();
  opts.degree_tolerance =
      deg_tol > 0 ? deg_tol : 3.0 * std::sqrt(std::log(std::max<double>(g.num_vertices(), 3)) / opts.d);
  opts.set_tolerance = set_tol > 0 ? set_tol : 5.0 / std::sqrt(omega);

  const ExpansionReport rep = check_expansion(g, omega, samples, derive_seed(cfg.master_seed, 0), opts);
  std::uint64_t sets_ok = 0;
  for (const auto& s : rep.sets) sets_ok += s.ok;
  std::cout << "d=" << format_double(rep.d) << " degrees=[" << rep.min_degree << ", "
            << rep.max_degree << "] max_deviation=" << format_double(rep.max_degree_deviation)
            << " degrees_ok=" << (rep.degrees_ok ? "true" : "false") << " sets_ok=" << sets_ok << "/"
            << rep.sets.size() << " all_ok=" << (rep.all_ok ? "true" : "false") << "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    nlohmann::json j{{"d", rep.d},
                     {"min_degree", rep.min_degree},
                     {"max_degree", rep.max_degree},
                     {"max_degree_deviation", rep.max_degree_deviation},
                     {"degrees_ok", rep.degrees_ok},
                     {"sets_ok", sets_ok},
                     {"sets_total", rep.sets.size()},
                     {"all_ok", rep.all_ok}};
    const fs::path report = fs::path(out_dir) / "expansion.json";
    write_text(report, j.dump(2) + "\n");
    write_manifest(out_dir, "expansion", cfg, g, nullptr, wall.ms(), {{"report", report.string()}});
  }
  return 0;
}

int cmd_bounds(const std::vector<Vertex>& ns, const std::vector<double>& ps, double omega,
               double c1, double c2) {
  if (ns.empty() || ps.empty()) throw std::invalid_argument("bounds: need --n and --p");
  if (ns.size() == 1 && ps.size() == 1) {
    const BoundPrediction b = predict_bounds(ns[0], ps[0]);
    std::cout << "lower = " << format_double(b.lower) << "\nupper = " << format_double(b.upper)
              << "\nregime = " << b.regime << "\n";
    if (b.outside_hypothesis) std::cout << "warning: p*n <= ln n, outside the connectivity regime\n";
    if (omega > 1.0) {
      const PhaseThresholds t = phase_thresholds(ns[0], ps[0], omega);
      std::cout << "t1 = " << format_double(t.t1) << "\nt2 = " << format_double(t.t2)
                << (t.no_phase2 ? " (no phase 2)" : "") << "\nt3 = " << format_double(t.t3)
                << "\nt4 = " << format_double(t.t4) << "\n";
      for (const auto& [name, value] : t.named_b())
        std::cout << name << " = " << format_double(value) << "\n";
    }
    if (c1 > 0.0 || c2 > 0.0) {
      const EtaSequence eta = eta_sequence(ps[0], c1, c2, 64);
      std::cout << "eta: eps = " << format_double(eta.eps)
                << " envelope = " << format_double(eta.envelope) << " fixed_point = "
                << (eta.fixed_point ? format_double(*eta.fixed_point) : std::string("none"));
      if (eta.first_envelope_violation)
        std::cout << " envelope_violated_at = " << *eta.first_envelope_violation;
      std::cout << "\n";
    }
    return 0;
  }
  std::cout << "n,p,lower,upper,regime,outside_hypothesis\n";
  for (Vertex n : ns)
    for (double p : ps) {
      const BoundPrediction b = predict_bounds(n, p);
      std::cout << n << "," << format_double(p) << "," << format_double(b.lower) << ","
                << format_double(b.upper) << "," << b.regime << ","
                << (b.outside_hypothesis ? "true" : "false") << "\n";
    }
  return 0;
}

int cmd_oracle(const std::string& which, Vertex n_max, const std::string& y0_text) {
  const Rational ps[] = {make_rational(1, 4), make_rational(3, 10)};
  const Rational dls[] = {make_rational(2, 1), make_rational(3, 1)};
  bool all_pass = true;
  std::uint64_t events = 0;

  auto run_one = [&](const char* label, Vertex n, const std::vector<Vertex>& y0, const Rational& p,
                     const Rational& dl, bool edge_prob) {
    const OracleReport rep = edge_prob ? verify_lemma_edge_probability(n, p, y0, dl)
                                       : verify_edge_count_domination(n, p, y0, dl);
    events += rep.events_checked;
    all_pass = all_pass && rep.pass && rep.closed_form_match;
    if (!rep.pass || !rep.closed_form_match) {
      std::cout << "[FAIL] " << label << " n=" << n << " p=" << rational_str(p)
                << " d_lower=" << rational_str(dl) << " worst=" << rational_str(rep.worst_value)
                << " at " << rep.worst_witness << (rep.closed_form_match ? "" : " (closed form mismatch)")
                << "\n";
    }
  };

  auto sweep_grid = [&](const char* label, bool edge_prob) {
    for (Vertex n = 2; n <= n_max; ++n) {
      for (StateMask m = 1; m < (1u << n); ++m) {
        const int k = std::popcount(m);
        if (k > 2 || static_cast<Vertex>(k) >= n) continue;
        std::vector<Vertex> y0;
        for (Vertex v = 0; v < n; ++v)
          if (m & (1u << v)) y0.push_back(v);
        for (const Rational& p : ps)
          for (const Rational& dl : dls) run_one(label, n, y0, p, dl, edge_prob);
      }
    }
  };

  if (!y0_text.empty()) {
    // Single configuration mode: fixed y0 on n_max vertices, both p, both d_lower.
    const std::vector<Vertex> y0 = parse_vertex_list(y0_text);
    for (const Rational& p : ps)
      for (const Rational& dl : dls) {
        if (which != "edge-domination") run_one("edge-probability", n_max, y0, p, dl, true);
        if (which != "edge-probability") run_one("edge-domination", n_max, y0, p, dl, false);
      }
  } else {
    if (which != "edge-domination") sweep_grid("edge-probability", true);
    if (which != "edge-probability") sweep_grid("edge-domination", false);
  }
  std::cout << (all_pass ? "oracle: all bounds hold" : "oracle: violations found") << " ("
            << events << " conditioning events)\n";
  return all_pass ? 0 : 2;
}

int cmd_plotdata(const std::string& in_path, const std::string& x_axis, const std::string& y_axis,
                 const std::string& family_filter, const std::vector<Vertex>& n_filter,
                 const std::vector<double>& p_filter, const std::string& out_prefix) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open: " + in_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty table: " + in_path);

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.push_back("");
    return cells;
  };
  const std::vector<std::string> header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"family", "n", "p", "error"})
    if (!col.count(required)) throw std::runtime_error("not a summary table: missing column " + std::string(required));

  const bool x_is_column = col.count(x_axis) > 0;
  if (!x_is_column && x_axis != "loglogn" && x_axis != "loginvp")
    throw std::invalid_argument("unknown x axis: " + x_axis);
  if (!col.count(y_axis)) throw std::invalid_argument("unknown y axis: " + y_axis);

  std::vector<std::pair<double, double>> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() < header.size()) continue;
    if (!cells[col["error"]].empty()) continue;
    if (!family_filter.empty() && cells[col["family"]] != family_filter) continue;
    const double n_val = std::stod(cells[col["n"]]);
    if (!n_filter.empty() &&
        std::find(n_filter.begin(), n_filter.end(), static_cast<Vertex>(n_val)) == n_filter.end())
      continue;
    const std::string& p_cell = cells[col["p"]];
    if (!p_filter.empty()) {
      if (p_cell.empty()) continue;
      const double pv = std::stod(p_cell);
      if (std::find(p_filter.begin(), p_filter.end(), pv) == p_filter.end()) continue;
    }
    double x;
    if (x_axis == "loglogn")
      x = std::log2(std::log2(n_val));
    else if (x_axis == "loginvp") {
      if (p_cell.empty()) continue;
      x = std::log(1.0 / std::stod(p_cell));
    } else {
      const std::string& cell = cells[col[x_axis]];
      if (cell.empty()) continue;
      x = std::stod(cell);
    }
    const std::string& y_cell = cells[col[y_axis]];
    if (y_cell.empty()) continue;
    points.emplace_back(x, std::stod(y_cell));
  }
  if (points.empty()) throw std::invalid_argument("no rows left after filtering; nothing written");

  const fs::path csv = out_prefix + ".csv";
  const fs::path script = out_prefix + ".gp";
  std::string body = x_axis + "," + y_axis + "\n";
  for (const auto& [x, y] : points) body += format_double(x) + "," + format_double(y) + "\n";
  write_text(csv, body);
  write_text(script, "# render with: gnuplot -p " + script.string() +
                         "\nset datafile separator \",\"\nset xlabel \"" + x_axis +
                         "\"\nset ylabel \"" + y_axis + "\"\nplot \"" + csv.string() +
                         "\" skip 1 using 1:2 with linespoints title \"" + y_axis + "\"\n");
  std::cout << "wrote " << csv.string() << " (" << points.size() << " rows) and " << script.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probabilistic zero forcing laboratory"};
  app.require_subcommand(1);
  int rc = 0;

  // sample
  auto* sample = app.add_subcommand("sample", "sample or build a graph and write its edge list");
  ConfigFlags sample_f;
  sample_f.add_common(sample, false);
  std::string sample_out = "pzf_out";
  sample->add_option("--out", sample_out, "output directory");
  sample->callback([&] { rc = cmd_sample(sample_f, sample_out); });

  // exact
  auto* exact = app.add_subcommand("exact", "exact expected propagation time (rational arithmetic)");
  ConfigFlags exact_f;
  exact_f.add_common(exact, false);
  Vertex exact_cap = EXACT_DEFAULT_CAP;
  exact->add_option("--cap", exact_cap, "refuse graphs larger than this (state space is 2^n)");
  exact->callback([&] { rc = cmd_exact(exact_f, exact_cap); });

  // run
  auto* run = app.add_subcommand("run", "run trials, write records.jsonl + summary.csv + manifest");
  ConfigFlags run_f;
  run_f.add_common(run);
  std::string run_out = "pzf_out";
  run->add_option("--out", run_out, "output directory");
  run->callback([&] { rc = cmd_run(run_f, run_out); });

  // sweep
  auto* sw = app.add_subcommand("sweep", "run a grid of cells, write sweep.csv + manifest");
  ConfigFlags sweep_f;
  sweep_f.add_common(sw);
  std::vector<Vertex> sweep_ns;
  std::vector<double> sweep_ps;
  std::string sweep_out = "pzf_out";
  sw->add_option("--n-list", sweep_ns, "grid n values")->delimiter(',');
  sw->add_option("--p-list", sweep_ps, "grid p values")->delimiter(',');
  sw->add_option("--out", sweep_out, "output directory");
  sw->callback([&] { rc = cmd_sweep(sweep_f, sweep_ns, sweep_ps, sweep_out); });

  // couple
  auto* couple = app.add_subcommand("couple", "coupled runs: subset, alternative, shadow, event");
  couple->require_subcommand(1);
  ConfigFlags couple_f;
  std::string couple_s1 = "0", couple_s2 = "0,1", couple_target = "all", couple_out = "pzf_out";
  std::uint32_t couple_rounds = 0;
  for (const char* mode : {"subset", "alternative", "shadow", "event"}) {
    auto* m = couple->add_subcommand(mode);
    couple_f.add_common(m);
    m->add_option("--s1", couple_s1, "smaller start set");
    m->add_option("--s2", couple_s2, "larger start set (subset mode)");
    m->add_option("--target", couple_target, "event target set or 'all' (event mode)");
    m->add_option("--rounds", couple_rounds, "round budget (0 = default cap)");
    m->add_option("--out", couple_out, "output directory");
    // The flag set is registered on every mode; point resolve() at the one
    // that actually parsed.
    m->callback([&, mode, m] {
      couple_f.sub = m;
      rc = cmd_couple(mode, couple_f, couple_s1, couple_s2, couple_target, couple_rounds, couple_out);
    });
  }

  // expansion
  auto* exp = app.add_subcommand("expansion", "degree and vertex-expansion audit of a graph");
  ConfigFlags exp_f;
  exp_f.add_common(exp, false);
  std::uint32_t exp_samples = 100;
  double exp_d = 0, exp_deg_tol = 0, exp_set_tol = 0;
  std::string exp_out;
  exp->add_option("--samples", exp_samples, "sampled sets");
  exp->add_option("--d", exp_d, "degree baseline (default: mean degree)");
  exp->add_option("--degree-tol", exp_deg_tol, "max |deg/d - 1| (default: 3 sqrt(ln n / d))");
  exp->add_option("--set-tol", exp_set_tol, "max ||N(S)|/(s d) - 1| (default: 5/sqrt(omega))");
  exp->add_option("--out", exp_out, "optional output directory for the JSON report");
  exp->callback([&] { rc = cmd_expansion(exp_f, exp_samples, exp_d, exp_deg_tol, exp_set_tol, exp_out); });

  // bounds
  auto* bounds = app.add_subcommand("bounds", "propagation time predictions over a parameter grid");
  std::vector<Vertex> bounds_ns;
  std::vector<double> bounds_ps;
  double bounds_omega = 0, bounds_c1 = 0, bounds_c2 = 0;
  bounds->add_option("--n", bounds_ns, "n values")->delimiter(',')->required();
  bounds->add_option("--p", bounds_ps, "p values")->delimiter(',')->required();
  bounds->add_option("--omega", bounds_omega, "also print phase thresholds (single cell only)");
  bounds->add_option("--c1", bounds_c1, "eta recursion constant c1 (with --c2, single cell only)");
  bounds->add_option("--c2", bounds_c2, "eta recursion constant c2");
  bounds->callback([&] { rc = cmd_bounds(bounds_ns, bounds_ps, bounds_omega, bounds_c1, bounds_c2); });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exhaustive small-graph bound verification");
  std::string oracle_which = "both";
  Vertex oracle_nmax = 4;
  std::string oracle_y0;
  oracle->add_option("--which", oracle_which, "edge-probability, edge-domination, or both");
  oracle->add_option("--n-max", oracle_nmax, "largest vertex count in the grid (<= 4 is fast)");
  oracle->add_option("--y0", oracle_y0, "fixed source set; grid over all size-<=2 sets when absent");
  oracle->callback([&] { rc = cmd_oracle(oracle_which, oracle_nmax, oracle_y0); });

  // verify
  auto* verify = app.add_subcommand("verify", "run the acceptance suite; exit 2 on any failure");
  std::uint64_t verify_seed = 0;
  std::vector<int> verify_only;
  std::string verify_out = "./acceptance_out";
  verify->add_option("--seed", verify_seed, "master seed (required; no wall-clock seeding)")->required();
  verify->add_option("--only", verify_only, "criterion ids to run (default: all)");
  verify->add_option("--out", verify_out, "directory for result artifacts");
  verify->callback([&] {
    rc = run_acceptance(verify_only, verify_seed, verify_out, std::cout) == 0 ? 0 : 2;
  });

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "project a summary table to a two-column plot file");
  std::string plot_in, plot_x, plot_y = "median", plot_family, plot_prefix = "plot";
  std::vector<Vertex> plot_ns;
  std::vector<double> plot_ps;
  plot->add_option("--in", plot_in, "summary or sweep CSV")->required();
  plot->add_option("--x", plot_x, "x axis: a column name, loglogn, or loginvp")->required();
  plot->add_option("--y", plot_y, "y axis column (default median)");
  plot->add_option("--family", plot_family, "keep only this family");
  plot->add_option("--filter-n", plot_ns, "keep only these n")->delimiter(',');
  plot->add_option("--filter-p", plot_ps, "keep only these p")->delimiter(',');
  plot->add_option("--out", plot_prefix, "output file prefix (.csv and .gp)");
  plot->callback([&] {
    rc = cmd_plotdata(plot_in, plot_x, plot_y, plot_family, plot_ns, plot_ps, plot_prefix);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
