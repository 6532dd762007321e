#pragma once

// Rooted undirected topologies: construction, validation, the BFS distance
// oracle, the worst-case graph families, and the edge-list text format.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stabsim/error.hpp"
#include "stabsim/random.hpp"

namespace stabsim {

using NodeId = std::uint32_t;
inline constexpr NodeId kRoot = 0;
inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

using Edge = std::pair<NodeId, NodeId>;

/// Hop distances from `source` by breadth-first search over `adjacency`.
/// Unreached nodes get kUnreachable.
inline std::vector<std::uint32_t> bfs_from(const std::vector<std::vector<NodeId>>& adjacency,
                                           NodeId source) {
  std::vector<std::uint32_t> dist(adjacency.size(), kUnreachable);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : adjacency[u]) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

/// Immutable rooted graph. Node ids are dense (0..n-1) and the root is 0.
/// Root distances and the diameter are computed once at construction.
class Graph {
 public:
  /// Validates and builds. Throws GraphError on self-loops, duplicate edges,
  /// out-of-range ids, fewer than two nodes, or a disconnected topology.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges,
                          std::vector<std::string> labels = {}) {
    if (node_count < 2) throw GraphError("graph needs at least two nodes");
    if (!labels.empty() && labels.size() != node_count)
      throw GraphError("label vector size does not match node count");
    Graph g;
    g.adjacency_.assign(node_count, {});
    for (auto [u, v] : edges) {
      if (u >= node_count || v >= node_count)
        throw GraphError("edge {" + std::to_string(u) + "," + std::to_string(v) +
                         "} references a node outside 0.." + std::to_string(node_count - 1));
      if (u == v) throw GraphError("self-loop at node " + std::to_string(u));
      g.adjacency_[u].push_back(v);
      g.adjacency_[v].push_back(u);
    }
    for (NodeId p = 0; p < node_count; ++p) {
      auto& nb = g.adjacency_[p];
      std::sort(nb.begin(), nb.end());
      if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
        throw GraphError("duplicate edge at node " + std::to_string(p));
    }
    g.labels_ = labels.empty() ? std::vector<std::string>(node_count) : std::move(labels);
    g.distances_ = bfs_from(g.adjacency_, kRoot);
    for (NodeId p = 0; p < node_count; ++p)
      if (g.distances_[p] == kUnreachable)
        throw GraphError("graph is disconnected: node " + std::to_string(p) +
                         " is unreachable from the root");
    std::uint32_t diam = 0;
    for (NodeId p = 0; p < node_count; ++p) {
      const auto d = bfs_from(g.adjacency_, p);
      diam = std::max(diam, *std::max_element(d.begin(), d.end()));
    }
    g.diameter_ = diam;
    for (NodeId p = 0; p < node_count; ++p)
      if (!g.labels_[p].empty()) g.by_label_.emplace(g.labels_[p], p);
    return g;
  }

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  NodeId root() const noexcept { return kRoot; }
  std::span<const NodeId> neighbors(NodeId p) const { return adjacency_[p]; }
  std::size_t degree(NodeId p) const { return adjacency_[p].size(); }
  bool adjacent(NodeId u, NodeId v) const {
    return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nb : adjacency_) twice += nb.size();
    return twice / 2;
  }

  /// Edges with u < v, sorted lexicographically.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (NodeId u = 0; u < node_count(); ++u)
      for (NodeId v : adjacency_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  const std::string& label(NodeId p) const { return labels_[p]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<NodeId> find(std::string_view label) const {
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
  }
  /// Label if present, otherwise the decimal id.
  std::string name(NodeId p) const {
    return labels_[p].empty() ? std::to_string(p) : labels_[p];
  }

  /// ‖p, root‖.
  std::uint32_t distance(NodeId p) const { return distances_[p]; }
  std::span<const std::uint32_t> distances() const noexcept { return distances_; }
  std::uint32_t diameter() const noexcept { return diameter_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.adjacency_ == b.adjacency_ && a.labels_ == b.labels_;
  }

 private:
  Graph() = default;

  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<std::string> labels_;
  std::vector<std::uint32_t> distances_;
  std::uint32_t diameter_ = 0;
  std::map<std::string, NodeId> by_label_;
};

inline std::vector<std::uint32_t> bfs_distances(const Graph& g) {
  return {g.distances().begin(), g.distances().end()};
}

inline std::uint32_t diameter(const Graph& g) { return g.diameter(); }

// ---------------------------------------------------------------------------
// Builders

/// Path p_0 = root, ..., p_length.
inline Graph build_line(std::uint32_t length) {
  if (length == 0) throw GraphError("line length must be at least 1 edge");
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (NodeId i = 0; i < length; ++i) edges.emplace_back(i, i + 1);
  for (NodeId i = 0; i <= length; ++i) labels.push_back("p_" + std::to_string(i));
  return Graph::from_edges(length + 1, edges, std::move(labels));
}

/// Path p_0 .. p_{diam+1} plus the chord {p_{diam+1}, p_{diam-1}}.
inline Graph build_lollipop(std::uint32_t diam) {
  if (diam < 2) throw GraphError("lollipop diameter must be at least 2");
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (NodeId i = 0; i <= diam; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(diam - 1, diam + 1);
  for (NodeId i = 0; i <= diam + 1; ++i) labels.push_back("p_" + std::to_string(i));
  return Graph::from_edges(diam + 2, edges, std::move(labels));
}

/// Node ids of the G_k family. Root = 0, h.0 = 1, f.0 = 2, then e.j, f.j,
/// g.j, h.j for j = 1..k in blocks of four.
struct GkIds {
  static constexpr NodeId root() { return 0; }
  static constexpr NodeId h0() { return 1; }
  static constexpr NodeId f0() { return 2; }
  static constexpr NodeId e(std::uint32_t j) { return 3 + 4 * (j - 1); }
  static constexpr NodeId f(std::uint32_t j) { return j == 0 ? f0() : 4 + 4 * (j - 1); }
  static constexpr NodeId g(std::uint32_t j) { return 5 + 4 * (j - 1); }
  static constexpr NodeId h(std::uint32_t j) { return j == 0 ? h0() : 6 + 4 * (j - 1); }
};

/// G_k: 4k+3 nodes, diameter 2k+3.
inline Graph build_gk(std::uint32_t k) {
  if (k < 1) throw GraphError("G_k requires k >= 1");
  const std::size_t n = 4 * std::size_t(k) + 3;
  std::vector<std::string> labels(n);
  labels[GkIds::root()] = "R";
  labels[GkIds::h0()] = "h.0";
  labels[GkIds::f0()] = "f.0";
  std::vector<Edge> edges{{GkIds::root(), GkIds::h0()}, {GkIds::h0(), GkIds::f0()}};
  for (std::uint32_t j = 1; j <= k; ++j) {
    const auto s = std::to_string(j);
    labels[GkIds::e(j)] = "e." + s;
    labels[GkIds::f(j)] = "f." + s;
    labels[GkIds::g(j)] = "g." + s;
    labels[GkIds::h(j)] = "h." + s;
    edges.emplace_back(GkIds::f(j - 1), GkIds::e(j));
    edges.emplace_back(GkIds::e(j), GkIds::f(j));
    edges.emplace_back(GkIds::f(j), GkIds::h(j));
    edges.emplace_back(GkIds::g(j), GkIds::e(j));
  }
  return Graph::from_edges(n, edges, std::move(labels));
}

/// Appends `count` leaves attached to the root only, labelled v_1..v_count.
inline Graph add_root_leaves(const Graph& g, std::uint32_t count) {
  if (count == 0) return g;
  auto edges = g.edges();
  auto labels = g.labels();
  const auto n = static_cast<NodeId>(g.node_count());
  for (std::uint32_t i = 0; i < count; ++i) {
    edges.emplace_back(kRoot, n + i);
    labels.push_back("v_" + std::to_string(i + 1));
  }
  return Graph::from_edges(n + count, edges, std::move(labels));
}

/// Random connected graph on `n` nodes: a random recursive tree plus each
/// remaining pair independently with probability `extra_edge_prob`.
inline Graph random_connected_graph(std::size_t n, double extra_edge_prob, Rng& rng) {
  std::vector<Edge> edges;
  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
  // Tree built over a random permutation of the ids.
  std::vector<NodeId> perm(n);
  for (NodeId i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  for (NodeId i = 1; i < n; ++i) {
    const NodeId j = static_cast<NodeId>(uniform_below(rng, i));
    const NodeId u = perm[i], v = perm[j];
    edges.emplace_back(u, v);
    present[u][v] = present[v][u] = true;
  }
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (!present[u][v] && bernoulli(rng, extra_edge_prob)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

// ---------------------------------------------------------------------------
// Edge-list text format
//
//   root <id>
//   <u> <v>
//   label <id> <string>
//
// '#' starts a comment. Ids must be dense 0..n-1. A root other than 0 is
// swapped with node 0 so the in-memory graph keeps root = 0.

inline Graph parse_graph(std::istream& in) {
  std::optional<NodeId> root;
  std::vector<Edge> edges;
  std::vector<std::pair<NodeId, std::string>> label_lines;
  std::string raw;
  std::size_t line_no = 0;
  NodeId max_id = 0;
  bool any_id = false;
  auto parse_id = [&](const std::string& tok) -> NodeId {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("expected a node id, got '" + tok + "'", line_no);
    unsigned long long v = 0;
    try {
      v = std::stoull(tok);
    } catch (const std::exception&) {
      throw ParseError("node id out of range: " + tok, line_no);
    }
    if (v >= std::numeric_limits<NodeId>::max()) throw ParseError("node id out of range: " + tok, line_no);
    max_id = std::max<NodeId>(max_id, static_cast<NodeId>(v));
    any_id = true;
    return static_cast<NodeId>(v);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "root") {
      std::string id, extra;
      if (!(ls >> id) || (ls >> extra)) throw ParseError("expected 'root <id>'", line_no);
      if (root) throw ParseError("duplicate root line", line_no);
      if (!edges.empty()) throw ParseError("root line must precede edges", line_no);
      root = parse_id(id);
    } else if (first == "label") {
      std::string id, text, extra;
      if (!(ls >> id >> text) || (ls >> extra)) throw ParseError("expected 'label <id> <string>'", line_no);
      label_lines.emplace_back(parse_id(id), text);
    } else {
      std::string second, extra;
      if (!(ls >> second) || (ls >> extra)) throw ParseError("expected '<u> <v>'", line_no);
      if (!root) throw ParseError("missing 'root <id>' line before edges", line_no);
      const NodeId u = parse_id(first), v = parse_id(second);
      if (u == v) throw ParseError("self-loop at node " + first, line_no);
      edges.emplace_back(u, v);
    }
  }
  if (!root) throw ParseError("missing 'root <id>' line", 0);
  if (edges.empty()) throw ParseError("graph has no edges", 0);
  const std::size_t n = std::size_t(max_id) + 1;
  {
    std::vector<Edge> canon;
    for (auto [u, v] : edges) canon.emplace_back(std::min(u, v), std::max(u, v));
    std::sort(canon.begin(), canon.end());
    if (auto dup = std::adjacent_find(canon.begin(), canon.end()); dup != canon.end())
      throw ParseError("edge {" + std::to_string(dup->first) + "," + std::to_string(dup->second) +
                           "} listed more than once",
                       0);
  }
  auto remap = [&](NodeId x) -> NodeId {
    if (x == *root) return kRoot;
    if (x == kRoot) return *root;
    return x;
  };
  std::vector<Edge> mapped;
  for (auto [u, v] : edges) mapped.emplace_back(remap(u), remap(v));
  std::vector<std::string> labels;
  if (!label_lines.empty()) {
    labels.assign(n, "");
    for (auto& [id, text] : label_lines) {
      if (id >= n) throw ParseError("label for unknown node " + std::to_string(id), 0);
      labels[remap(id)] = text;
    }
  }
  try {
    return Graph::from_edges(n, mapped, std::move(labels));
  } catch (const GraphError& e) {
    throw ParseError(e.what(), 0);
  }
}

inline Graph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_graph(in);
}

inline std::string serialize_graph(const Graph& g) {
  std::ostringstream out;
  out << "root " << g.root() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
  for (NodeId p = 0; p < g.node_count(); ++p)
    if (!g.label(p).empty()) out << "label " << p << ' ' << g.label(p) << '\n';
  return out.str();
}

}  // namespace stabsim
