#include "pzf/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "pzf/rng.hpp"

namespace pzf {

namespace {

nlohmann::json rule_to_json(const RuleSpec& rule) {
  switch (rule.kind) {
    case RuleKind::standard:
      return "standard";
    case RuleKind::classical:
      return "classical";
    case RuleKind::alternative:
      return nlohmann::json{{"kind", "alternative"},
                            {"d_lower", rule.d_lower},
                            {"active", rule.active_all ? "all" : "none"}};
  }
  throw std::logic_error("rule_to_json: bad kind");
}

RuleSpec rule_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "standard") return RuleSpec::standard();
    if (s == "classical") return {RuleKind::classical, 0.0, true};
    throw std::invalid_argument("config: unknown rule \"" + s + "\"");
  }
  if (j.is_object()) {
    if (j.value("kind", "") != "alternative")
      throw std::invalid_argument("config: rule object must have kind \"alternative\"");
    const double d_lower = j.at("d_lower").get<double>();
    const std::string active = j.value("active", "all");
    if (active != "all" && active != "none")
      throw std::invalid_argument("config: rule.active must be \"all\" or \"none\"");
    return RuleSpec::alternative(d_lower, active == "all");
  }
  throw std::invalid_argument("config: rule must be a string or an object");
}

nlohmann::json start_to_json(const StartPolicy& s) {
  if (s.kind == StartKind::min_singleton) return nlohmann::json{{"kind", "min_singleton"}};
  return nlohmann::json{{"kind", "fixed_set"}, {"set", s.set}};
}

StartPolicy start_from_json(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return StartPolicy::fixed({j.get<Vertex>()});
  if (j.is_string()) {
    if (j.get<std::string>() == "min") return StartPolicy::min_singleton();
    throw std::invalid_argument("config: start string must be \"min\"");
  }
  if (j.is_object()) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "min_singleton") return StartPolicy::min_singleton();
    if (kind == "fixed_set") return StartPolicy::fixed(j.at("set").get<std::vector<Vertex>>());
    throw std::invalid_argument("config: unknown start kind \"" + kind + "\"");
  }
  throw std::invalid_argument("config: start must be a vertex, \"min\", or an object");
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be at least 1");
  if (cfg.workers < 1) throw std::invalid_argument("config: workers must be at least 1");
  if (cfg.family == "gnp") {
    if (!(cfg.p >= 0.0) || cfg.p > 1.0) throw std::invalid_argument("config: gnp needs p in [0, 1]");
  } else if (cfg.family == "file") {
    if (cfg.graph_file.empty()) throw std::invalid_argument("config: family file needs graph_file");
  }
  if (cfg.start.kind == StartKind::fixed_set && cfg.start.set.empty())
    throw std::invalid_argument("config: fixed start set is empty");
}

// Phase thresholds are defined on gnp; requesting them elsewhere is an error.
std::vector<std::pair<std::string, double>> resolve_thresholds(const ExperimentConfig& cfg) {
  if (!cfg.thresholds_omega) return {};
  if (cfg.family != "gnp")
    throw std::invalid_argument("config: thresholds_omega needs a gnp experiment");
  return phase_thresholds(cfg.n, cfg.p, *cfg.thresholds_omega).named_b();
}

struct TrialPlan {
  const ExperimentConfig* cfg;
  const Graph* g;
  std::uint32_t max_rounds;
  std::vector<std::pair<std::string, double>> thresholds;
  ForcingProcess::Recording rec;
};

TrialRecord make_trial(const TrialPlan& plan, std::uint32_t k) {
  const ExperimentConfig& cfg = *plan.cfg;
  const Graph& g = *plan.g;
  const std::uint64_t trial_seed = derive_seed(cfg.master_seed, k);
  const Vertex n = g.num_vertices();

  TrialRecord rec;
  if (cfg.start.kind == StartKind::fixed_set) {
    rec = run_process(g, make_vertex_set(n, cfg.start.set), cfg.rule, trial_seed, plan.max_rounds,
                      plan.thresholds, plan.rec);
  } else {
    // Min over n independent single-vertex processes; ties (and the all-cap
    // case) resolve to the lowest vertex, so the record is well defined.
    bool have = false;
    VertexSet one(n);
    for (Vertex v = 0; v < n; ++v) {
      one.reset();
      one.set(v);
      TrialRecord sub = run_process(g, one, cfg.rule, derive_seed(trial_seed, v), plan.max_rounds,
                                    plan.thresholds, plan.rec);
      const bool better =
          !have || (sub.pt.has_value() && (!rec.pt.has_value() || *sub.pt < *rec.pt));
      if (better) {
        rec = std::move(sub);
        have = true;
      }
      if (rec.pt && *rec.pt == 1 && v + 1 < n) {
        // 1 is the floor for any proper start; later vertices cannot improve.
        break;
      }
    }
  }
  rec.seed = cfg.master_seed;
  rec.trial = k;
  rec.n = n;
  rec.p = cfg.p;
  rec.family = cfg.family == "file" ? "file:" + cfg.graph_file : cfg.family;
  return rec;
}

void run_trials_parallel(const TrialPlan& plan, std::uint32_t trials, std::uint32_t workers,
                         const std::function<void(const TrialRecord&)>& sink) {
  std::mutex mu;
  std::condition_variable cv_ready, cv_space;
  std::map<std::uint32_t, TrialRecord> ready;
  std::atomic<std::uint32_t> next_claim{0};
  std::uint32_t next_emit = 0;
  std::exception_ptr err;
  const std::uint32_t window = 4 * workers + 16;

  auto work = [&] {
    try {
      for (;;) {
        const std::uint32_t k = next_claim.fetch_add(1);
        if (k >= trials) return;
        TrialRecord rec = make_trial(plan, k);
        std::unique_lock lk(mu);
        cv_space.wait(lk, [&] { return err || k < next_emit + window; });
        if (err) return;
        ready.emplace(k, std::move(rec));
        cv_ready.notify_all();
      }
    } catch (...) {
      std::lock_guard lk(mu);
      if (!err) err = std::current_exception();
      cv_ready.notify_all();
      cv_space.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint32_t i = 0; i < workers; ++i) pool.emplace_back(work);

  try {
    while (next_emit < trials) {
      TrialRecord rec;
      {
        std::unique_lock lk(mu);
        cv_ready.wait(lk, [&] { return err || ready.count(next_emit) > 0; });
        if (err) break;
        auto it = ready.find(next_emit);
        rec = std::move(it->second);
        ready.erase(it);
        ++next_emit;
        cv_space.notify_all();
      }
      sink(rec);
    }
  } catch (...) {
    std::lock_guard lk(mu);
    if (!err) err = std::current_exception();
    cv_space.notify_all();
  }

  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double quantile(const std::vector<std::uint32_t>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (static_cast<double>(sorted[lo + 1]) - static_cast<double>(sorted[lo]));
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["family"] = family;
  j["n"] = n;
  j["p"] = std::isnan(p) ? nlohmann::json(nullptr) : nlohmann::json(p);
  j["graph_file"] = graph_file.empty() ? nlohmann::json(nullptr) : nlohmann::json(graph_file);
  j["start"] = start_to_json(start);
  j["rule"] = rule_to_json(rule);
  j["trials"] = trials;
  j["max_rounds"] = max_rounds ? nlohmann::json(*max_rounds) : nlohmann::json(nullptr);
  j["master_seed"] = master_seed;
  j["workers"] = workers;
  j["record_blue_edges"] = record_blue_edges;
  j["record_white_deg"] = record_white_deg;
  j["thresholds_omega"] = thresholds_omega ? nlohmann::json(*thresholds_omega) : nlohmann::json(nullptr);
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  static const char* known[] = {"family",     "n",          "p",
                                "graph_file", "start",      "rule",
                                "trials",     "max_rounds", "master_seed",
                                "workers",    "record_blue_edges", "record_white_deg",
                                "thresholds_omega"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("config: unknown key \"" + key + "\"");
  }

  ExperimentConfig cfg;
  cfg.family = j.value("family", cfg.family);
  cfg.n = j.value("n", cfg.n);
  if (j.contains("p") && !j["p"].is_null()) cfg.p = j["p"].get<double>();
  if (j.contains("graph_file") && !j["graph_file"].is_null())
    cfg.graph_file = j["graph_file"].get<std::string>();
  if (j.contains("start")) cfg.start = start_from_json(j["start"]);
  if (j.contains("rule")) cfg.rule = rule_from_json(j["rule"]);
  cfg.trials = j.value("trials", cfg.trials);
  if (j.contains("max_rounds") && !j["max_rounds"].is_null())
    cfg.max_rounds = j["max_rounds"].get<std::uint32_t>();
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.record_blue_edges = j.value("record_blue_edges", cfg.record_blue_edges);
  cfg.record_white_deg = j.value("record_white_deg", cfg.record_white_deg);
  if (j.contains("thresholds_omega") && !j["thresholds_omega"].is_null())
    cfg.thresholds_omega = j["thresholds_omega"].get<double>();
  check_config(cfg);
  return cfg;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(to_json().dump()); }

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return ExperimentConfig::from_json(j);
}

Graph build_graph(const ExperimentConfig& cfg) {
  check_config(cfg);
  if (cfg.family == "gnp")
    return sample_gnp(cfg.n, cfg.p, derive_seed(cfg.master_seed ^ SEED_DOMAIN_GRAPH, 0));
  if (cfg.family == "file") {
    Graph g = read_edge_list_file(cfg.graph_file);
    if (cfg.n != 0 && cfg.n != g.num_vertices())
      throw std::invalid_argument("config: n does not match the graph file");
    return g;
  }
  return named_graph(cfg.family, cfg.n);
}

std::string sampler_mode(const ExperimentConfig& cfg) {
  if (cfg.family == "gnp") return gnp_sampler_mode(cfg.p);
  if (cfg.family == "file") return "file";
  return "named";
}

void run_trials(const ExperimentConfig& cfg, const Graph& g,
                const std::function<void(const TrialRecord&)>& sink) {
  check_config(cfg);
  TrialPlan plan;
  plan.cfg = &cfg;
  plan.g = &g;
  plan.max_rounds = cfg.max_rounds ? *cfg.max_rounds : default_max_rounds(g.num_vertices(), cfg.p);
  plan.thresholds = resolve_thresholds(cfg);
  plan.rec = {cfg.record_blue_edges, cfg.record_white_deg};

  if (cfg.workers == 1 || cfg.trials == 1) {
    for (std::uint32_t k = 0; k < cfg.trials; ++k) sink(make_trial(plan, k));
    return;
  }
  run_trials_parallel(plan, cfg.trials, cfg.workers, sink);
}

void StatsCollector::add(const TrialRecord& rec) {
  if (rec.status == TrialStatus::forced && rec.pt)
    pts_.push_back(*rec.pt);
  else
    ++cap_hits_;
}

SummaryStats StatsCollector::finish() const {
  SummaryStats s;
  s.cap_hits = cap_hits_;
  if (pts_.empty()) return s;

  std::vector<std::uint32_t> v = pts_;
  std::sort(v.begin(), v.end());
  s.empty = false;
  s.count = v.size();
  s.min = v.front();
  s.max = v.back();

  double sum = 0;
  for (std::uint32_t x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() >= 2) {
    double ss = 0;
    for (std::uint32_t x : v) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
    s.se_defined = true;
  }
  s.median = quantile(v, 0.5);
  s.q10 = quantile(v, 0.1);
  s.q90 = quantile(v, 0.9);
  return s;
}

SummaryStats summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  StatsCollector c;
  for (const auto& r : records) c.add(r);
  return c.finish();
}

std::vector<CellResult> sweep(const ExperimentConfig& tmpl, const std::vector<SweepCell>& grid,
                              const std::function<void(std::size_t, const TrialRecord&)>& record_sink) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<CellResult> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CellResult row;
    row.config = tmpl;
    row.config.n = grid[i].n;
    if (tmpl.family == "gnp") row.config.p = grid[i].p;
    try {
      const Graph g = build_graph(row.config);
      StatsCollector collector;
      run_trials(row.config, g, [&](const TrialRecord& rec) {
        collector.add(rec);
        if (record_sink) record_sink(i, rec);
      });
      row.stats = collector.finish();
      if (row.config.family == "gnp") {
        try {
          row.bounds = predict_bounds(row.config.n, row.config.p);
        } catch (const std::exception&) {
          // outside the predictor's domain (n < 16, p = 0): no columns
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

FitResult fit_growth(const std::vector<CellResult>& rows, GrowthModel model) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : rows) {
    if (!row.error.empty() || row.stats.empty) continue;
    double x;
    if (model == GrowthModel::loglog_n) {
      x = std::log2(std::log2(static_cast<double>(row.config.n)));
    } else {
      if (!(row.config.p > 0.0)) continue;
      x = std::log(1.0 / row.config.p);
    }
    pts.emplace_back(x, row.stats.median);
  }
  if (pts.size() < 3) throw std::invalid_argument("fit_growth: need at least 3 usable rows");
  return fit_line(pts);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "";
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string summary_csv_header() {
  return "family,n,p,trials,count,cap_hits,mean,se,median,q10,q90,min,max,pred_lower,pred_upper,error";
}

std::string summary_csv_row(const ExperimentConfig& cfg, const SummaryStats& stats,
                            const std::optional<BoundPrediction>& bounds, const std::string& error) {
  std::string row = cfg.family;
  row += ',' + std::to_string(cfg.n);
  row += ',' + format_double(cfg.p);
  row += ',' + std::to_string(cfg.trials);
  row += ',' + std::to_string(stats.count);
  row += ',' + std::to_string(stats.cap_hits);
  auto stat = [&](double v, bool defined) { row += ','; if (defined) row += format_double(v); };
  stat(stats.mean, !stats.empty);
  stat(stats.se, stats.se_defined);
  stat(stats.median, !stats.empty);
  stat(stats.q10, !stats.empty);
  stat(stats.q90, !stats.empty);
  row += ',';
  if (!stats.empty) row += std::to_string(stats.min);
  row += ',';
  if (!stats.empty) row += std::to_string(stats.max);
  stat(bounds ? bounds->lower : 0.0, bounds.has_value());
  stat(bounds ? bounds->upper : 0.0, bounds.has_value());
  row += ',';
  row += error;
  return row;
}

nlohmann::json make_manifest(const std::string& command, const ExperimentConfig& cfg, const Graph& g,
                             const SummaryStats* stats, std::uint64_t wall_ms,
                             const std::vector<std::pair<std::string, std::string>>& outputs) {
  nlohmann::json m;
  m["engine_version"] = ENGINE_VERSION;
  m["command"] = command;
  m["master_seed"] = cfg.master_seed;
  m["config"] = cfg.to_json();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  m["config_hash"] = hex;
  m["sampler_mode"] = sampler_mode(cfg);
  m["graph"] = {{"n", g.num_vertices()}, {"m", g.num_edges()}};
  if (stats) {
    nlohmann::json s;
    s["count"] = stats->count;
    s["cap_hits"] = stats->cap_hits;
    if (!stats->empty) {
      s["mean"] = stats->mean;
      if (stats->se_defined) s["se"] = stats->se;
      s["median"] = stats->median;
      s["q10"] = stats->q10;
      s["q90"] = stats->q90;
      s["min"] = stats->min;
      s["max"] = stats->max;
    }
    m["stats"] = s;
  }
  m["wall_time_ms"] = wall_ms;
  nlohmann::json outs = nlohmann::json::object();
  for (const auto& [k, v] : outputs) outs[k] = v;
  m["outputs"] = outs;
  return m;
}

}  // namespace pzf
