#include "pzf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pzf/rng.hpp"

namespace pzf {

Graph graph_from_csr(Vertex n, std::vector<std::uint64_t> offsets, std::vector<Vertex> adj) {
  Graph g;
  g.n_ = n;
  g.m_ = adj.size() / 2;
  g.offsets_ = std::move(offsets);
  g.adj_ = std::move(adj);
  return g;
}

namespace {

// Shared CSR assembly from a degree census plus a second pass that emits
// edges in lexicographic order. emit(cb) must call cb(u, v) with u < v,
// ascending, and make identical calls on both passes.
template <typename EmitFn>
Graph build_csr(Vertex n, EmitFn&& emit) {
  std::vector<std::uint32_t> degree(n, 0);
  std::uint64_t m = 0;
  emit([&](Vertex u, Vertex v) {
    ++degree[u];
    ++degree[v];
    ++m;
  });

  std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  for (Vertex u = 0; u < n; ++u) offsets[u + 1] = offsets[u] + degree[u];
  std::vector<Vertex> adj(2 * m);

  // Lexicographic emission keeps every list sorted: vertex w receives its
  // smaller neighbors during their rows (ascending) and then its larger
  // neighbors during row w (also ascending).
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  emit([&](Vertex u, Vertex v) {
    adj[cursor[u]++] = v;
    adj[cursor[v]++] = u;
  });
  return graph_from_csr(n, std::move(offsets), std::move(adj));
}

Graph from_sorted_unique_edges(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  return build_csr(n, [&](auto&& cb) {
    for (const auto& [u, v] : edges) cb(u, v);
  });
}

}  // namespace

Graph Graph::from_edges(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  std::vector<std::pair<Vertex, Vertex>> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u == v) throw std::invalid_argument("self-loop");
    if (u >= n || v >= n) throw std::invalid_argument("vertex out of range");
    if (u > v) std::swap(u, v);
    canon.emplace_back(u, v);
  }
  std::sort(canon.begin(), canon.end());
  if (std::adjacent_find(canon.begin(), canon.end()) != canon.end())
    throw std::invalid_argument("duplicate edge");
  return from_sorted_unique_edges(n, canon);
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

void Graph::validate() const {
  if (offsets_.size() != static_cast<std::size_t>(n_) + 1 || offsets_[0] != 0)
    throw std::runtime_error("graph: bad offset table");
  if (offsets_[n_] != adj_.size() || adj_.size() != 2 * m_)
    throw std::runtime_error("graph: edge count mismatch");
  for (Vertex u = 0; u < n_; ++u) {
    auto nb = neighbors(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      Vertex v = nb[i];
      if (v >= n_) throw std::runtime_error("graph: neighbor out of range");
      if (v == u) throw std::runtime_error("graph: self-loop");
      if (i > 0 && nb[i - 1] >= v) throw std::runtime_error("graph: adjacency not sorted unique");
      if (!has_edge(v, u)) throw std::runtime_error("graph: asymmetric adjacency");
    }
  }
}

Graph sample_gnp(Vertex n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_gnp: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_gnp: p must lie in [0,1]");

  if (p == 0.0 || n == 1) return build_csr(n, [](auto&&) {});
  if (p == 1.0) {
    return build_csr(n, [&](auto&& cb) {
      for (Vertex u = 0; u + 1 < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) cb(u, v);
    });
  }

  if (p >= 0.1) {
    // Dense mode: one Bernoulli draw per pair, lexicographic order.
    return build_csr(n, [&](auto&& cb) {
      Rng rng(seed);
      for (Vertex u = 0; u + 1 < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
          if (rng.bernoulli(p)) cb(u, v);
    });
  }

  // Sparse mode: geometric skips through the lexicographic pair sequence.
  return build_csr(n, [&](auto&& cb) {
    Rng rng(seed);
    Vertex u = 0, v = 0;  // v == u means "before the first pair of row u"
    for (;;) {
      std::uint64_t skip = rng.geometric_skip(p);
      // Advance skip positions, then land on the next selected pair.
      for (;;) {
        std::uint64_t row_left = (n - 1) - (v == u ? u : v);  // pairs remaining in row u
        if (skip < row_left) {
          v = (v == u ? u : v) + static_cast<Vertex>(skip) + 1;
          break;
        }
        skip -= row_left;
        ++u;
        if (u + 1 >= n) return;
        v = u;
      }
      cb(u, v);
    }
  });
}

Graph named_graph(const std::string& family, Vertex n) {
  if (family == "path") {
    if (n < 1) throw std::invalid_argument("path: n must be >= 1");
    return build_csr(n, [&](auto&& cb) {
      for (Vertex u = 0; u + 1 < n; ++u) cb(u, u + 1);
    });
  }
  if (family == "cycle") {
    if (n < 3) throw std::invalid_argument("cycle: n must be >= 3");
    return build_csr(n, [&](auto&& cb) {
      for (Vertex u = 0; u + 1 < n; ++u) cb(u, u + 1);
      cb(0, n - 1);
    });
  }
  if (family == "star") {
    if (n < 1) throw std::invalid_argument("star: need at least one leaf");
    return build_csr(n + 1, [&](auto&& cb) {
      for (Vertex leaf = 1; leaf <= n; ++leaf) cb(0, leaf);
    });
  }
  if (family == "complete") {
    if (n < 1) throw std::invalid_argument("complete: n must be >= 1");
    return build_csr(n, [&](auto&& cb) {
      for (Vertex u = 0; u + 1 < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) cb(u, v);
    });
  }
  throw std::invalid_argument("unknown graph family: " + family);
}

VertexSet neighborhood(const Graph& g, const VertexSet& s) {
  if (s.size() != g.num_vertices()) throw std::invalid_argument("neighborhood: set size mismatch");
  VertexSet out(g.num_vertices());
  for (std::size_t u = s.find_first(); u != VertexSet::npos; u = s.find_next(u))
    for (Vertex v : g.neighbors(u))
      if (!s.test(v)) out.set(v);
  return out;
}

bool is_connected(const Graph& g) {
  Vertex n = g.num_vertices();
  if (n <= 1) return true;
  std::vector<Vertex> stack{0};
  VertexSet seen(n);
  seen.set(0);
  Vertex count = 1;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex v : g.neighbors(u)) {
      if (!seen.test(v)) {
        seen.set(v);
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (Vertex u = 0; u < g.num_vertices(); ++u)
    for (Vertex v : g.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::uint64_t n = 0, m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("edge list: missing header");
  if (n > 0xffffffffULL) throw std::runtime_error("edge list: n too large");
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(m);
  std::uint64_t u = 0, v = 0;
  while (in >> u >> v) {
    if (u >= n || v >= n) throw std::runtime_error("edge list: vertex out of range");
    if (u >= v) throw std::runtime_error("edge list: edges must satisfy u < v");
    if (!edges.empty() && std::pair<Vertex, Vertex>{static_cast<Vertex>(u), static_cast<Vertex>(v)} <= edges.back())
      throw std::runtime_error("edge list: edges out of order");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (!in.eof()) throw std::runtime_error("edge list: trailing garbage");
  if (edges.size() != m) throw std::runtime_error("edge list: edge count mismatch");
  Graph g = from_sorted_unique_edges(static_cast<Vertex>(n), edges);
  g.validate();
  return g;
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_edge_list(g, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_edge_list(in);
}

ExpansionReport check_expansion(const Graph& g, double omega, std::uint32_t sample_count,
                                std::uint64_t seed, const ExpansionOptions& opts) {
  if (omega <= 1) throw std::invalid_argument("check_expansion: omega must exceed 1");
  Vertex n = g.num_vertices();
  ExpansionReport rep;
  rep.d = opts.d > 0 ? opts.d : g.mean_degree();
  if (rep.d <= 0) throw std::invalid_argument("check_expansion: graph has no degree baseline");

  rep.min_degree = n > 0 ? g.degree(0) : 0;
  rep.max_degree = rep.min_degree;
  for (Vertex u = 0; u < n; ++u) {
    rep.min_degree = std::min(rep.min_degree, g.degree(u));
    rep.max_degree = std::max(rep.max_degree, g.degree(u));
  }
  rep.max_degree_deviation =
      std::max(std::abs(rep.min_degree / rep.d - 1.0), std::abs(rep.max_degree / rep.d - 1.0));
  rep.degrees_ok = rep.max_degree_deviation <= opts.degree_tolerance;

  std::uint64_t max_size =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n / (rep.d * omega)));
  max_size = std::min<std::uint64_t>(max_size, n);

  rep.all_ok = rep.degrees_ok;
  Rng rng(seed);
  VertexSet s(n);
  for (std::uint32_t i = 0; i < sample_count; ++i) {
    std::uint64_t size = 1 + rng.below(max_size);
    s.reset();
    for (std::uint64_t picked = 0; picked < size;) {
      Vertex u = static_cast<Vertex>(rng.below(n));
      if (!s.test(u)) {
        s.set(u);
        ++picked;
      }
    }
    SetExpansionResult r;
    r.set_size = size;
    r.boundary_size = neighborhood(g, s).count();
    double expected = static_cast<double>(r.set_size) * rep.d;
    r.deviation = static_cast<double>(r.boundary_size) / expected - 1.0;
    r.ok = std::abs(r.deviation) <= opts.set_tolerance;
    rep.all_ok = rep.all_ok && r.ok;
    rep.sets.push_back(r);
  }
  return rep;
}

}  // namespace pzf
