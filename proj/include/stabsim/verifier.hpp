#pragma once

// Legitimacy, BFS-tree checks, attractor indexes and the G_k
// configuration classes.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stabsim/algorithm.hpp"
#include "stabsim/error.hpp"
#include "stabsim/graph.hpp"

namespace stabsim {

inline bool is_legitimate(const Graph& g, const Configuration& conf) {
  if (conf.size() != g.node_count() || conf.d(kRoot) != 0) return false;
  for (NodeId p = 1; p < g.node_count(); ++p) {
    if (conf.d(p) != g.distance(p)) return false;
    const NodeId q = conf.par(p);
    if (q >= g.node_count() || !g.adjacent(p, q) || conf.d(p) != conf.d(q) + 1) return false;
  }
  return true;
}

/// Parent edges {par_p, p} for every non-root p, as (min, max) pairs.
using TreeEdges = std::vector<Edge>;

inline TreeEdges extract_tree(const Graph& g, const Configuration& conf) {
  TreeEdges out;
  for (NodeId p = 1; p < g.node_count(); ++p) {
    const NodeId q = conf.par(p);
    out.emplace_back(std::min(p, q), std::max(p, q));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

enum class TreeDefect : std::uint8_t { None, NotSubgraph, Cycle, NotSpanning, NotShortest };

inline std::string_view to_string(TreeDefect d) {
  switch (d) {
    case TreeDefect::None: return "ok";
    case TreeDefect::NotSubgraph: return "not-subgraph";
    case TreeDefect::Cycle: return "cycle";
    case TreeDefect::NotSpanning: return "not-spanning";
    case TreeDefect::NotShortest: return "not-shortest";
  }
  return "?";
}

struct TreeCheck {
  TreeDefect defect = TreeDefect::None;
  explicit operator bool() const noexcept { return defect == TreeDefect::None; }
};

inline TreeCheck verify_bfs_tree(const Graph& g, const TreeEdges& edges) {
  const std::size_t n = g.node_count();
  for (auto [u, v] : edges)
    if (u >= n || v >= n || u == v || !g.adjacent(u, v)) return {TreeDefect::NotSubgraph};

  // Union-find detects cycles; a forest with n-1 edges is spanning.
  std::vector<NodeId> up(n);
  for (NodeId i = 0; i < n; ++i) up[i] = i;
  auto find = [&](NodeId x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  for (auto [u, v] : edges) {
    const NodeId a = find(u), b = find(v);
    if (a == b) return {TreeDefect::Cycle};
    up[a] = b;
  }
  if (edges.size() != n - 1) return {TreeDefect::NotSpanning};

  std::vector<std::vector<NodeId>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  const auto depth = bfs_from(adj, kRoot);
  for (NodeId p = 0; p < n; ++p)
    if (depth[p] != g.distance(p)) return {TreeDefect::NotShortest};
  return {};
}

namespace detail {

inline bool pred_correct_node(const Graph& g, const Configuration& c, NodeId p, std::uint32_t i) {
  const auto dist = g.distance(p);
  if (dist > i) return true;
  const NodeId q = c.par(p);
  return c.d(p) == dist && q < c.size() && c.d(p) == c.d(q) + 1;
}

inline bool pred_sub_d(const Graph& g, const Configuration& c, NodeId p, std::uint32_t i) {
  return g.distance(p) <= i || c.d(p) > i;
}

inline bool pred_correct_d(const Graph& g, const Configuration& c, NodeId p, std::uint32_t i) {
  return g.distance(p) > i || c.d(p) == g.distance(p);
}

inline bool pred_ub_d(const Graph& g, const Configuration& c, NodeId p, std::uint32_t i) {
  if (g.distance(p) <= i || c.d(p) > i) return true;
  if (c.d(p) != i) return false;
  for (NodeId q : g.neighbors(p))
    if (c.d(q) <= i + 1) return true;
  return false;
}

template <class Pred>
std::uint32_t max_index(const Graph& g, Pred holds_at) {
  std::uint32_t best = 0;
  for (std::uint32_t i = 0; i <= g.diameter(); ++i)
    if (holds_at(i)) best = i;
  return best;
}

}  // namespace detail

inline bool in_att(const Graph& g, const Configuration& c, std::uint32_t i) {
  for (NodeId p = 1; p < g.node_count(); ++p)
    if (!detail::pred_correct_node(g, c, p, i)) return false;
  return true;
}

inline bool in_att_b(const Graph& g, const Configuration& c, std::uint32_t i) {
  if (!in_att(g, c, i)) return false;
  for (NodeId p = 0; p < g.node_count(); ++p)
    if (!detail::pred_sub_d(g, c, p, i)) return false;
  return true;
}

inline bool in_att_hc(const Graph& g, const Configuration& c, std::uint32_t i) {
  for (NodeId p = 0; p < g.node_count(); ++p)
    if (!detail::pred_correct_d(g, c, p, i)) return false;
  for (NodeId p = 1; p < g.node_count(); ++p)
    if (!detail::pred_ub_d(g, c, p, i)) return false;
  return true;
}

/// Largest i in [0..diameter] with the configuration in Att(i).
inline std::uint32_t att_index(const Graph& g, const Configuration& c) {
  return detail::max_index(g, [&](std::uint32_t i) { return in_att(g, c, i); });
}
inline std::uint32_t att_b_index(const Graph& g, const Configuration& c) {
  return detail::max_index(g, [&](std::uint32_t i) { return in_att_b(g, c, i); });
}
inline std::uint32_t att_hc_index(const Graph& g, const Configuration& c) {
  return detail::max_index(g, [&](std::uint32_t i) { return in_att_hc(g, c, i); });
}

/// d-value -> processes holding it.
inline std::map<std::uint32_t, std::vector<NodeId>> partition_by_distance_value(const Configuration& conf) {
  std::map<std::uint32_t, std::vector<NodeId>> out;
  for (NodeId p = 0; p < conf.size(); ++p) out[conf.d(p)].push_back(p);
  return out;
}

enum class ConfClass : std::uint8_t { A, B, C, Four };

inline std::string_view to_string(ConfClass c) {
  switch (c) {
    case ConfClass::A: return "a";
    case ConfClass::B: return "b";
    case ConfClass::C: return "c";
    case ConfClass::Four: return "four";
  }
  return "?";
}

/// k such that g has the G_k node count; throws otherwise.
inline std::uint32_t gk_order(const Graph& g) {
  const auto n = g.node_count();
  if (n < 7 || (n - 3) % 4 != 0) throw GraphError("graph is not a G_k instance");
  return static_cast<std::uint32_t>((n - 3) / 4);
}

namespace detail {

inline bool conf_class_common(const Configuration& c, std::uint32_t i, std::uint32_t z) {
  using Id = GkIds;
  if (c.d(Id::h0()) != z - 1) return false;
  if ((c.d(Id::f0()) == z) != (c.par(Id::f0()) == Id::h0())) return false;
  for (std::uint32_t j = 1; j <= i; ++j) {
    if (c.d(Id::g(j)) != z - 1 || c.d(Id::h(j)) != z - 1) return false;
    if ((c.d(Id::e(j)) == z) != (c.par(Id::e(j)) == Id::g(j))) return false;
    if ((c.d(Id::f(j)) == z) != (c.par(Id::f(j)) == Id::h(j))) return false;
  }
  return true;
}

inline bool conf_class_rec(const Configuration& c, ConfClass cls, std::uint32_t i, std::uint32_t x,
                           std::uint32_t z) {
  using Id = GkIds;
  const auto de = c.d(Id::e(i)), df = c.d(Id::f(i));
  if (i == 1) {
    const auto d0 = c.d(Id::f0());
    switch (cls) {
      case ConfClass::B: return de == z && df == z && d0 == x;
      case ConfClass::C: return de == x && df == z && d0 == z;
      case ConfClass::Four: return de == z && d0 == z && df == x;
      case ConfClass::A: break;
    }
    throw Error("configuration class a is not defined at level 1");
  }
  switch (cls) {
    case ConfClass::A: return de == x && df == z && conf_class_rec(c, ConfClass::C, i - 1, x, z);
    case ConfClass::B: return de == z && df == z && conf_class_rec(c, ConfClass::Four, i - 1, x, z);
    case ConfClass::C: return de == x && df == z && conf_class_rec(c, ConfClass::C, i - 1, z, z);
    case ConfClass::Four: return de == z && df == x && conf_class_rec(c, ConfClass::C, i - 1, z, z);
  }
  return false;
}

}  // namespace detail

/// Membership of `conf` (on G_k) in the class `cls` at level i with
/// parameters (x, z). Only the constraints of the class are checked; the
/// fixtures g.j, h.j, h.0 must hold z-1 at every level up to i.
inline bool in_conf_class(const Graph& gk, const Configuration& conf, ConfClass cls, std::uint32_t i,
                          std::uint32_t x, std::uint32_t z) {
  const auto k = gk_order(gk);
  if (i < 1 || i > k) throw Error("class level out of range");
  if (cls == ConfClass::A && i == 1) throw Error("configuration class a is not defined at level 1");
  if (x < 1 || z < 2) throw Error("class parameters require x >= 1 and z > 1");
  if (conf.size() != gk.node_count()) return false;
  return detail::conf_class_common(conf, i, z) && detail::conf_class_rec(conf, cls, i, x, z);
}

}  // namespace stabsim
