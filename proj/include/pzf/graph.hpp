#ifndef PZF_GRAPH_HPP
#define PZF_GRAPH_HPP

// Simple undirected graphs in CSR form.
//
// Invariants held by every Graph this module hands out:
//   - no self-loops, no duplicate edges, symmetric adjacency
//   - each adjacency list is sorted ascending
//   - degree(u) == neighbors(u).size()
// validate() re-checks all of them and is run by the file reader.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace pzf {

using Vertex = std::uint32_t;
using VertexSet = boost::dynamic_bitset<std::uint64_t>;

class Graph {
 public:
  Graph() = default;

  // Edges may arrive in any order and either orientation; duplicates and
  // self-loops are rejected.
  static Graph from_edges(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges);

  Vertex num_vertices() const { return n_; }
  std::uint64_t num_edges() const { return m_; }

  std::uint32_t degree(Vertex u) const {
    return static_cast<std::uint32_t>(offsets_[u + 1] - offsets_[u]);
  }

  std::span<const Vertex> neighbors(Vertex u) const {
    return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
  }

  bool has_edge(Vertex u, Vertex v) const;

  // Mean degree 2m/n, the default expansion baseline.
  double mean_degree() const {
    return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(m_) / static_cast<double>(n_);
  }

  void validate() const;  // throws std::runtime_error on any broken invariant

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && offsets_ == other.offsets_ && adj_ == other.adj_;
  }

 private:
  Vertex n_ = 0;
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<Vertex> adj_;

  friend Graph graph_from_csr(Vertex n, std::vector<std::uint64_t> offsets, std::vector<Vertex> adj);
};

// Internal assembly point for prebuilt CSR arrays; every public constructor
// funnels through it. offsets must have n + 1 entries and adj holds both
// orientations of each edge.
Graph graph_from_csr(Vertex n, std::vector<std::uint64_t> offsets, std::vector<Vertex> adj);

// Erdos-Renyi sample. Every unordered pair appears independently with
// probability p. Two deterministic modes share one seed: per-pair Bernoulli
// draws for p >= 0.1, geometric skips over the lexicographic pair sequence
// for p < 0.1. Both build the CSR in two passes by replaying the stream, so
// no temporary edge list is materialized.
Graph sample_gnp(Vertex n, double p, std::uint64_t seed);

// Which mode sample_gnp uses for this p; recorded in run manifests.
inline const char* gnp_sampler_mode(double p) { return p < 0.1 ? "sparse" : "dense"; }

// path(n): n >= 1 vertices in a line. cycle(n): n >= 3. complete(n): n >= 1.
// star(n): n >= 1 leaves around center vertex 0, so n + 1 vertices total.
Graph named_graph(const std::string& family, Vertex n);

// Vertices outside S adjacent to at least one member of S.
VertexSet neighborhood(const Graph& g, const VertexSet& s);

bool is_connected(const Graph& g);

// Edge list format: "n m" header, then one "u v" line per edge with u < v,
// ascending lexicographic. Round-trips bit-exactly through read_edge_list.
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list(std::istream& in);  // throws std::runtime_error on malformed input
void write_edge_list_file(const Graph& g, const std::string& path);
Graph read_edge_list_file(const std::string& path);

struct ExpansionOptions {
  double d = 0.0;                 // expected degree baseline; 0 means use 2m/n
  double degree_tolerance = 0.0;  // max allowed |deg(v)/d - 1|
  double set_tolerance = 0.0;     // max allowed ||N(S)|/(s*d) - 1|
};

struct SetExpansionResult {
  std::size_t set_size = 0;
  std::uint64_t boundary_size = 0;
  double deviation = 0.0;  // |N(S)| / (s*d) - 1
  bool ok = false;
};

struct ExpansionReport {
  double d = 0.0;
  std::uint32_t min_degree = 0;
  std::uint32_t max_degree = 0;
  double max_degree_deviation = 0.0;  // max over v of |deg(v)/d - 1|
  bool degrees_ok = false;
  std::vector<SetExpansionResult> sets;
  bool all_ok = false;
};

// Audits near-regularity of degrees and vertex expansion against the s*d
// baseline. Samples sample_count sets deterministically from seed: the size s
// is uniform in [1, max(1, floor(n/(d*omega)))] and the s vertices are
// uniform without replacement. Tolerances come from the caller; the theory
// only pins them up to a constant, so none is hard-coded here.
ExpansionReport check_expansion(const Graph& g, double omega, std::uint32_t sample_count,
                                std::uint64_t seed, const ExpansionOptions& opts);

}  // namespace pzf

#endif  // PZF_GRAPH_HPP
