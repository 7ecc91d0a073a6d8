#ifndef PZF_MONTECARLO_HPP
#define PZF_MONTECARLO_HPP

// Trial orchestration: deterministic seed derivation, ordered streaming of
// trial records, summary statistics, parameter sweeps and growth-law fits.
//
// Determinism contract: the record stream is a pure function of the config.
// Trial k always runs on seed derive_seed(master_seed, k); workers only
// change who computes a record, never its content or its position in the
// stream, so JSONL outputs are byte-identical for any worker count.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pzf/bounds.hpp"
#include "pzf/forcing.hpp"
#include "pzf/graph.hpp"

namespace pzf {

inline constexpr const char* ENGINE_VERSION = "0.1.0";

enum class StartKind { fixed_set, min_singleton };

struct StartPolicy {
  StartKind kind = StartKind::fixed_set;
  std::vector<Vertex> set = {0};

  static StartPolicy fixed(std::vector<Vertex> vertices) {
    return {StartKind::fixed_set, std::move(vertices)};
  }
  static StartPolicy min_singleton() { return {StartKind::min_singleton, {}}; }
};

struct ExperimentConfig {
  std::string family = "path";  // path | cycle | star | complete | gnp | file
  Vertex n = 0;
  double p = std::numeric_limits<double>::quiet_NaN();  // gnp only
  std::string graph_file;                               // family == "file" only
  StartPolicy start;
  RuleSpec rule;
  std::uint32_t trials = 1;
  std::optional<std::uint32_t> max_rounds;  // absent: default_max_rounds
  std::uint64_t master_seed = 1;
  std::uint32_t workers = 1;
  bool record_blue_edges = false;
  bool record_white_deg = false;
  std::optional<double> thresholds_omega;  // request phase-crossing columns

  nlohmann::json to_json() const;  // canonical form, also the hash input
  static ExperimentConfig from_json(const nlohmann::json& j);  // strict keys
  std::uint64_t hash() const;
};

ExperimentConfig load_config_file(const std::string& path);

// Materializes the graph the config describes. gnp samples with seed
// derive_seed(master_seed ^ SEED_DOMAIN_GRAPH, 0); named families and files
// are deterministic on their own.
Graph build_graph(const ExperimentConfig& cfg);

// "dense"/"sparse" for gnp, "named"/"file" otherwise; manifests record it.
std::string sampler_mode(const ExperimentConfig& cfg);

// Streams trial records 0..trials-1 in index order to sink. Under the
// min_singleton policy each trial runs one process per start vertex v on
// seed derive_seed(trial_seed, v) and keeps the record with the smallest
// propagation time, lowest vertex on ties; if every sub-run hits the round
// cap the vertex-0 record is emitted as the trial's cap-hit.
void run_trials(const ExperimentConfig& cfg, const Graph& g,
                const std::function<void(const TrialRecord&)>& sink);

struct SummaryStats {
  std::uint64_t count = 0;     // forced records only
  std::uint64_t cap_hits = 0;  // excluded from the moments below
  bool empty = true;           // no forced record at all
  double mean = 0;
  double se = 0;  // sample stddev / sqrt(count); undefined for count < 2
  bool se_defined = false;
  double median = 0, q10 = 0, q90 = 0;  // linear-interpolation quantiles
  std::uint32_t min = 0, max = 0;
};

class StatsCollector {
 public:
  void add(const TrialRecord& rec);
  SummaryStats finish() const;  // full sort; exact order statistics

 private:
  std::vector<std::uint32_t> pts_;
  std::uint64_t cap_hits_ = 0;
};

SummaryStats summarize(const std::vector<TrialRecord>& records);  // throws on zero records

struct SweepCell {
  Vertex n = 0;
  double p = std::numeric_limits<double>::quiet_NaN();
};

struct CellResult {
  ExperimentConfig config;  // the template resolved to this cell
  SummaryStats stats;
  std::optional<BoundPrediction> bounds;  // gnp cells in the predictor's range
  std::string error;                      // nonempty: cell failed, sweep went on
};

// One run_trials+summarize per cell. Cells share the template's master seed,
// so a one-cell sweep reproduces a plain run exactly and any cell can be
// reproduced alone. record_sink, when given, sees every record of every
// successful cell in (cell, trial) order.
std::vector<CellResult> sweep(const ExperimentConfig& tmpl, const std::vector<SweepCell>& grid,
                              const std::function<void(std::size_t, const TrialRecord&)>& record_sink = {});

enum class GrowthModel { loglog_n, log_inv_p };

// Least squares of median propagation time against log2 log2 n or ln(1/p)
// over the usable (no-error, nonempty) rows. Throws below 3 usable rows or
// on a degenerate regressor.
FitResult fit_growth(const std::vector<CellResult>& rows, GrowthModel model);

// Shortest round-trip decimal form; empty string for NaN (CSV null).
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);

std::string summary_csv_header();
std::string summary_csv_row(const ExperimentConfig& cfg, const SummaryStats& stats,
                            const std::optional<BoundPrediction>& bounds, const std::string& error);

// Reproduction manifest: engine version, config echo + hash, sampler mode,
// graph dimensions, stats, wall time and output paths. Wall time is the one
// field excluded from byte-identity guarantees.
nlohmann::json make_manifest(const std::string& command, const ExperimentConfig& cfg, const Graph& g,
                             const SummaryStats* stats, std::uint64_t wall_ms,
                             const std::vector<std::pair<std::string, std::string>>& outputs);

}  // namespace pzf

#endif  // PZF_MONTECARLO_HPP
