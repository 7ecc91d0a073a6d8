// Python surface for the forcing laboratory: graph construction, exact
// solves, single runs, coupled runs, bound predictors, and batch trials.
// Rationals cross the boundary as strings; callers wanting arithmetic can
// feed them to fractions.Fraction. Record-shaped results cross as dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pzf/bounds.hpp"
#include "pzf/coupling.hpp"
#include "pzf/exact.hpp"
#include "pzf/forcing.hpp"
#include "pzf/graph.hpp"
#include "pzf/montecarlo.hpp"
#include "pzf/rng.hpp"

namespace py = pybind11;
using namespace pzf;

namespace {

VertexSet to_set(const Graph& g, const std::vector<Vertex>& vs) {
  VertexSet s(g.num_vertices());
  for (Vertex v : vs) {
    if (v >= g.num_vertices()) throw std::invalid_argument("vertex out of range");
    s.set(v);
  }
  return s;
}

std::vector<Vertex> from_set(const VertexSet& s) {
  std::vector<Vertex> out;
  for (std::size_t v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    out.push_back(static_cast<Vertex>(v));
  return out;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

RuleSpec parse_rule(const std::string& rule, double d_lower, bool active_all) {
  if (rule == "standard") return RuleSpec::standard();
  if (rule == "alternative") return RuleSpec::alternative(d_lower, active_all);
  throw std::invalid_argument("rule must be 'standard' or 'alternative'");
}

py::dict summary_to_py(const SummaryStats& s) {
  py::dict d;
  d["count"] = s.count;
  d["cap_hits"] = s.cap_hits;
  d["empty"] = s.empty;
  if (!s.empty) {
    d["mean"] = s.mean;
    d["median"] = s.median;
    d["q10"] = s.q10;
    d["q90"] = s.q90;
    d["min"] = s.min;
    d["max"] = s.max;
    if (s.se_defined) d["se"] = s.se;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "probabilistic zero forcing laboratory";
  m.attr("ENGINE_VERSION") = ENGINE_VERSION;

  py::class_<Graph>(m, "Graph")
      .def_static(
          "from_edges",
          [](Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
            return Graph::from_edges(n, edges);
          },
          py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &Graph::num_vertices)
      .def_property_readonly("m", &Graph::num_edges)
      .def("degree", &Graph::degree, py::arg("v"))
      .def(
          "neighbors",
          [](const Graph& g, Vertex v) {
            const auto nbrs = g.neighbors(v);
            return std::vector<Vertex>(nbrs.begin(), nbrs.end());
          },
          py::arg("v"))
      .def("mean_degree", &Graph::mean_degree)
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.num_vertices()) + ", m=" +
               std::to_string(g.num_edges()) + ")";
      });

  m.def("named_graph", &named_graph, py::arg("family"), py::arg("n"));
  m.def("sample_gnp", &sample_gnp, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("is_connected", &is_connected, py::arg("g"));
  m.def("read_edge_list_file", &read_edge_list_file, py::arg("path"));
  m.def(
      "write_edge_list_file",
      [](const Graph& g, const std::string& path) { write_edge_list_file(g, path); },
      py::arg("g"), py::arg("path"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));

  // Exact layer: rationals as strings, distributions as (mask, probability) lists.
  m.def(
      "expected_propagation_time",
      [](const Graph& g, const std::vector<Vertex>& start, Vertex cap) {
        return rational_str(expected_propagation_time(g, to_set(g, start), cap));
      },
      py::arg("g"), py::arg("start"), py::arg("cap") = EXACT_DEFAULT_CAP);
  m.def(
      "min_expected_propagation_time",
      [](const Graph& g, Vertex cap) {
        const auto [v, e] = min_expected_propagation_time(g, cap);
        return py::make_tuple(v, rational_str(e));
      },
      py::arg("g"), py::arg("cap") = EXACT_DEFAULT_CAP);
  m.def(
      "transition_distribution",
      [](const Graph& g, const std::vector<Vertex>& blue) {
        const TransitionDistribution t = transition_distribution(g, to_set(g, blue));
        std::vector<std::pair<std::uint64_t, std::string>> entries;
        for (const auto& [mask, prob] : t.entries) entries.emplace_back(mask, rational_str(prob));
        return entries;
      },
      py::arg("g"), py::arg("blue"));

  // Single runs.
  m.def(
      "run_process",
      [](const Graph& g, const std::vector<Vertex>& start, std::uint64_t seed,
         std::uint32_t max_rounds, const std::string& rule, double d_lower, bool active_all) {
        const std::uint32_t cap = max_rounds ? max_rounds : default_max_rounds(g.num_vertices(), std::nan(""));
        const TrialRecord r =
            run_process(g, to_set(g, start), parse_rule(rule, d_lower, active_all), seed, cap);
        return json_to_py(nlohmann::json::parse(r.to_jsonl()));
      },
      py::arg("g"), py::arg("start"), py::arg("seed"), py::arg("max_rounds") = 0,
      py::arg("rule") = "standard", py::arg("d_lower") = 0.0, py::arg("active_all") = true);
  m.def(
      "run_with_shadow",
      [](const Graph& g, const std::vector<Vertex>& start, std::uint64_t seed,
         std::uint32_t max_rounds) {
        const std::uint32_t cap = max_rounds ? max_rounds : default_max_rounds(g.num_vertices(), std::nan(""));
        const ShadowResult s = run_with_shadow(g, to_set(g, start), seed, cap);
        py::dict d;
        d["probabilistic"] = json_to_py(nlohmann::json::parse(s.probabilistic.to_jsonl()));
        d["classical"] = json_to_py(nlohmann::json::parse(s.classical.to_jsonl()));
        d["containment"] = s.containment;
        return d;
      },
      py::arg("g"), py::arg("start"), py::arg("seed"), py::arg("max_rounds") = 0);

  // Coupled runs.
  m.def(
      "coupled_run_subset",
      [](const Graph& g, const std::vector<Vertex>& s1, const std::vector<Vertex>& s2,
         std::uint32_t rounds, std::uint64_t seed) {
        const CoupledResult r = coupled_run_subset(g, to_set(g, s1), to_set(g, s2), rounds, seed);
        py::dict d;
        d["containment"] = r.containment;
        d["validity_violation"] = r.validity_violation;
        d["blue1"] = [&] {
          std::vector<std::size_t> counts;
          for (const auto& b : r.blue1) counts.push_back(b.count());
          return counts;
        }();
        d["blue2"] = [&] {
          std::vector<std::size_t> counts;
          for (const auto& b : r.blue2) counts.push_back(b.count());
          return counts;
        }();
        return d;
      },
      py::arg("g"), py::arg("s1"), py::arg("s2"), py::arg("rounds"), py::arg("seed"));
  m.def(
      "estimate_force_event_probability",
      [](const Graph& g, const std::vector<Vertex>& start, const std::vector<Vertex>& target,
         std::uint32_t rounds, std::uint32_t trials, std::uint64_t seed) {
        const EventEstimate e =
            estimate_force_event_probability(g, to_set(g, start), to_set(g, target), rounds, trials, seed);
        py::dict d;
        d["estimate"] = e.estimate;
        d["se"] = e.se;
        d["successes"] = e.successes;
        d["trials"] = e.trials;
        return d;
      },
      py::arg("g"), py::arg("start"), py::arg("target"), py::arg("rounds"), py::arg("trials"),
      py::arg("seed"));

  // Bound predictors and diagnostics.
  m.def("predict_bounds", [](std::uint64_t n, double p) {
    const BoundPrediction b = predict_bounds(n, p);
    py::dict d;
    d["lower"] = b.lower;
    d["upper"] = b.upper;
    d["regime"] = b.regime;
    d["outside_hypothesis"] = b.outside_hypothesis;
    return d;
  }, py::arg("n"), py::arg("p"));
  m.def("chernoff_tail", &chernoff_tail, py::arg("eps"), py::arg("mean"));
  m.def("phase_thresholds", [](std::uint64_t n, double p, double omega) {
    const PhaseThresholds t = phase_thresholds(n, p, omega);
    py::dict d;
    d["t1"] = t.t1;
    d["t2"] = t.t2;
    d["t3"] = t.t3;
    d["t4"] = t.t4;
    d["b1"] = t.b1;
    d["b2"] = t.b2;
    d["b3"] = t.b3;
    d["b4"] = t.b4;
    d["d"] = t.d;
    d["growth"] = t.growth;
    d["no_phase2"] = t.no_phase2;
    return d;
  }, py::arg("n"), py::arg("p"), py::arg("omega"));
  m.def("eta_sequence", [](double p, double c1, double c2, std::size_t count) {
    const EtaSequence e = eta_sequence(p, c1, c2, count);
    py::dict d;
    d["eps"] = e.eps;
    d["values"] = e.values;
    d["envelope"] = e.envelope;
    d["envelope_ok"] = e.envelope_ok;
    d["first_envelope_violation"] =
        e.first_envelope_violation ? py::cast(*e.first_envelope_violation) : py::none();
    d["fixed_point"] = e.fixed_point ? py::cast(*e.fixed_point) : py::none();
    return d;
  }, py::arg("p"), py::arg("c1"), py::arg("c2"), py::arg("count") = 64);

  // Batch trials: a thin path to run_trials returning (records, summary).
  m.def(
      "run_trials",
      [](const std::string& family, Vertex n, double p, const std::vector<Vertex>& start,
         bool min_singleton, std::uint64_t trials, std::uint64_t master_seed, std::uint32_t workers,
         bool keep_records) {
        ExperimentConfig cfg;
        cfg.family = family;
        cfg.n = n;
        cfg.p = p;
        cfg.start = min_singleton ? StartPolicy::min_singleton() : StartPolicy::fixed(start);
        cfg.trials = trials;
        cfg.master_seed = master_seed;
        cfg.workers = workers;
        const Graph g = build_graph(cfg);
        StatsCollector collector;
        py::list records;
        run_trials(cfg, g, [&](const TrialRecord& r) {
          collector.add(r);
          if (keep_records) records.append(json_to_py(nlohmann::json::parse(r.to_jsonl())));
        });
        py::dict d;
        d["summary"] = summary_to_py(collector.finish());
        d["records"] = records;
        return d;
      },
      py::arg("family"), py::arg("n"), py::arg("p") = std::nan(""),
      py::arg("start") = std::vector<Vertex>{0}, py::arg("min_singleton") = false,
      py::arg("trials") = 100, py::arg("master_seed") = 1, py::arg("workers") = 1,
      py::arg("keep_records") = false);

  m.def("check_expansion", [](const Graph& g, double omega, std::uint32_t samples,
                              std::uint64_t seed) {
    ExpansionOptions opts;
    opts.d = g.mean_degree();
    opts.degree_tolerance = 3.0 * std::sqrt(std::log(std::max<double>(g.num_vertices(), 3)) / opts.d);
    opts.set_tolerance = 5.0 / std::sqrt(omega);
    const ExpansionReport rep = check_expansion(g, omega, samples, seed, opts);
    py::dict d;
    d["d"] = rep.d;
    d["min_degree"] = rep.min_degree;
    d["max_degree"] = rep.max_degree;
    d["degrees_ok"] = rep.degrees_ok;
    d["sets"] = rep.sets.size();
    d["all_ok"] = rep.all_ok;
    return d;
  }, py::arg("g"), py::arg("omega") = 2.0, py::arg("samples") = 100, py::arg("seed") = 1);

  m.def("start_vertices", [](const Graph& g, const std::vector<Vertex>& vs) {
    return from_set(to_set(g, vs));  // round-trip used by tests to pin set order
  });
}
