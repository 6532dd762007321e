#pragma once

// Exhaustive exploration of the bounded variants on small graphs.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stabsim/algorithm.hpp"
#include "stabsim/engine.hpp"
#include "stabsim/error.hpp"
#include "stabsim/graph.hpp"
#include "stabsim/verifier.hpp"

namespace stabsim {

inline constexpr std::uint64_t kDefaultExploreCap = 10'000'000;

/// Number of configurations minus two, clamped at zero. Throws
/// OverflowError when the product does not fit in 64 bits.
inline std::uint64_t state_space_bound(const AlgorithmSpec& spec, const Graph& g) {
  if (!spec.bounded()) throw Error("state-space bound is defined for bounded variants only");
  const auto size = state_space_size(spec, g);
  if (!size) throw OverflowError("state-space size overflows 64 bits");
  return *size < 2 ? 0 : *size - 2;
}

/// Bijection between configurations and [0, size) in mixed radix: process p
/// contributes digit (d-1)*deg(p) + index of par among its neighbors.
class StateSpace {
 public:
  StateSpace(const AlgorithmSpec& spec, const Graph& g, std::uint64_t cap = kDefaultExploreCap)
      : spec_(spec), g_(g) {
    spec.validate();
    if (!spec.bounded()) throw Error("only bounded variants can be enumerated");
    const auto size = state_space_size(spec, g);
    if (!size || *size > cap)
      throw CapExceeded("state space of " + (size ? std::to_string(*size) : std::string("> 2^64")) +
                        " configurations exceeds the cap of " + std::to_string(cap));
    size_ = *size;
    weight_.assign(g.node_count(), 0);
    radix_.assign(g.node_count(), 1);
    std::uint64_t w = 1;
    for (NodeId p = 1; p < g.node_count(); ++p) {
      weight_[p] = w;
      radix_[p] = std::uint64_t(spec.D) * g.degree(p);
      w *= radix_[p];
    }
  }

  std::uint64_t size() const noexcept { return size_; }
  const AlgorithmSpec& spec() const noexcept { return spec_; }
  const Graph& graph() const noexcept { return g_; }

  std::uint64_t digit(NodeId p, ProcessState s) const {
    const auto nb = g_.neighbors(p);
    const auto it = std::lower_bound(nb.begin(), nb.end(), s.par);
    if (it == nb.end() || *it != s.par || s.d < 1 || s.d > spec_.D) throw Error("state outside the enumerated domain");
    return std::uint64_t(s.d - 1) * nb.size() + std::uint64_t(it - nb.begin());
  }
  std::uint64_t weight(NodeId p) const { return weight_[p]; }

  std::uint64_t encode(const Configuration& c) const {
    std::uint64_t idx = 0;
    for (NodeId p = 1; p < g_.node_count(); ++p) idx += digit(p, c[p]) * weight_[p];
    return idx;
  }

  Configuration decode(std::uint64_t idx) const {
    Configuration c(g_.node_count());
    for (NodeId p = 1; p < g_.node_count(); ++p) {
      const auto dg = idx % radix_[p];
      idx /= radix_[p];
      const auto nb = g_.neighbors(p);
      c.set(p, static_cast<std::uint32_t>(dg / nb.size() + 1), nb[dg % nb.size()]);
    }
    return c;
  }

 private:
  AlgorithmSpec spec_;
  Graph g_;
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> weight_;
  std::vector<std::uint64_t> radix_;
};

/// Successor relation over all daemon choices, in compressed row form.
class TransitionGraph {
 public:
  using Index = std::uint32_t;

  explicit TransitionGraph(StateSpace space) : space_(std::move(space)) {
    if (space_.size() > std::numeric_limits<Index>::max()) throw CapExceeded("state space too large for 32-bit indexes");
    const auto& g = space_.graph();
    const auto& spec = space_.spec();
    offsets_.reserve(space_.size() + 1);
    offsets_.push_back(0);
    std::vector<Index> row;
    struct Option {
      NodeId p;
      std::vector<std::int64_t> deltas;  // index change for each enabled rule
    };
    std::vector<Option> options;
    std::vector<std::size_t> choice;
    for (std::uint64_t idx = 0; idx < space_.size(); ++idx) {
      const auto conf = space_.decode(idx);
      options.clear();
      for (NodeId p = 1; p < g.node_count(); ++p) {
        const auto rules = enabled_rules(spec, g, conf, p);
        if (rules.empty()) continue;
        Option o{p, {}};
        const auto old_digit = static_cast<std::int64_t>(space_.digit(p, conf[p]));
        for (RuleId r : rules.to_vector()) {
          const auto after = rule_effect(spec, g, conf, p, r);
          o.deltas.push_back((static_cast<std::int64_t>(space_.digit(p, after)) - old_digit) *
                             static_cast<std::int64_t>(space_.weight(p)));
        }
        options.push_back(std::move(o));
      }
      // Odometer over {skip, rule_1, ..., rule_m} per enabled process.
      row.clear();
      choice.assign(options.size(), 0);
      while (true) {
        std::size_t pos = 0;
        while (pos < options.size() && ++choice[pos] > options[pos].deltas.size()) choice[pos++] = 0;
        if (pos == options.size()) break;
        std::int64_t next = static_cast<std::int64_t>(idx);
        for (std::size_t i = 0; i < options.size(); ++i)
          if (choice[i] > 0) next += options[i].deltas[choice[i] - 1];
        row.push_back(static_cast<Index>(next));
      }
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      succ_.insert(succ_.end(), row.begin(), row.end());
      offsets_.push_back(succ_.size());
    }
  }

  TransitionGraph(const AlgorithmSpec& spec, const Graph& g, std::uint64_t cap = kDefaultExploreCap)
      : TransitionGraph(StateSpace(spec, g, cap)) {}

  const StateSpace& space() const noexcept { return space_; }
  std::uint64_t size() const noexcept { return space_.size(); }
  std::span<const Index> successors(std::uint64_t idx) const {
    return {succ_.data() + offsets_[idx], offsets_[idx + 1] - offsets_[idx]};
  }
  std::size_t edge_count() const noexcept { return succ_.size(); }

 private:
  StateSpace space_;
  std::vector<std::uint64_t> offsets_;
  std::vector<Index> succ_;
};

struct TerminationReport {
  bool acyclic = true;
  std::vector<Configuration> cycle;  // witness: each configuration steps to the next, the last to the first
  std::vector<std::uint32_t> postorder;  // reverse topological order when acyclic
  explicit operator bool() const noexcept { return acyclic; }
};

/// Iterative three-colour depth-first search; self-loops count as cycles.
inline TerminationReport check_termination(const TransitionGraph& tg) {
  using Index = TransitionGraph::Index;
  enum : std::uint8_t { White, Grey, Black };
  const auto n = tg.size();
  std::vector<std::uint8_t> colour(n, White);
  std::vector<std::pair<Index, std::size_t>> stack;
  TerminationReport rep;
  rep.postorder.reserve(n);
  for (std::uint64_t root = 0; root < n; ++root) {
    if (colour[root] != White) continue;
    stack.emplace_back(static_cast<Index>(root), 0);
    colour[root] = Grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto succ = tg.successors(v);
      if (next == succ.size()) {
        colour[v] = Black;
        rep.postorder.push_back(v);
        stack.pop_back();
        continue;
      }
      const Index w = succ[next++];
      if (colour[w] == Grey) {
        rep.acyclic = false;
        std::size_t from = stack.size();
        while (stack[from - 1].first != w) --from;
        for (std::size_t i = from - 1; i < stack.size(); ++i) rep.cycle.push_back(tg.space().decode(stack[i].first));
        rep.postorder.clear();
        return rep;
      }
      if (colour[w] == White) {
        colour[w] = Grey;
        stack.emplace_back(w, 0);
      }
    }
  }
  return rep;
}

struct SinkReport {
  bool ok = true;
  std::uint64_t sink_count = 0;
  std::uint64_t legitimate_count = 0;
  std::optional<Configuration> terminal_not_legitimate;
  std::optional<Configuration> legitimate_not_terminal;
  explicit operator bool() const noexcept { return ok; }
};

/// Compares the set of sinks with the set of legitimate configurations.
inline SinkReport check_sinks(const TransitionGraph& tg, const Graph& g) {
  SinkReport rep;
  for (std::uint64_t idx = 0; idx < tg.size(); ++idx) {
    const bool sink = tg.successors(idx).empty();
    const auto conf = tg.space().decode(idx);
    const bool legit = is_legitimate(g, conf);
    rep.sink_count += sink;
    rep.legitimate_count += legit;
    if (sink && !legit && !rep.terminal_not_legitimate) rep.terminal_not_legitimate = conf;
    if (legit && !sink && !rep.legitimate_not_terminal) rep.legitimate_not_terminal = conf;
  }
  rep.ok = !rep.terminal_not_legitimate && !rep.legitimate_not_terminal;
  return rep;
}

/// Number of steps of the longest execution. Requires an acyclic relation.
inline std::uint64_t longest_path(const TransitionGraph& tg, const TerminationReport& term) {
  if (!term.acyclic) throw Error("longest path is undefined on a cyclic transition relation");
  std::vector<std::uint64_t> len(tg.size(), 0);
  std::uint64_t best = 0;
  for (auto v : term.postorder) {
    std::uint64_t l = 0;
    for (auto w : tg.successors(v)) l = std::max(l, len[w] + 1);
    len[v] = l;
    best = std::max(best, l);
  }
  return best;
}

inline std::uint64_t longest_path(const TransitionGraph& tg) { return longest_path(tg, check_termination(tg)); }

struct ExploreReport {
  std::uint64_t config_count = 0;
  std::uint64_t sink_count = 0;
  std::uint64_t legitimate_count = 0;
  bool acyclic = false;
  bool sinks_match = false;
  std::optional<std::uint64_t> longest_path;
  std::uint64_t bound = 0;
  std::vector<Configuration> cycle;
  SinkReport sinks;

  bool ok() const noexcept { return acyclic && sinks_match && longest_path && *longest_path <= bound; }
};

inline ExploreReport explore(const AlgorithmSpec& spec, const Graph& g, std::uint64_t cap = kDefaultExploreCap) {
  const TransitionGraph tg(spec, g, cap);
  ExploreReport rep;
  rep.config_count = tg.size();
  rep.bound = state_space_bound(spec, g);
  auto term = check_termination(tg);
  rep.acyclic = term.acyclic;
  rep.cycle = std::move(term.cycle);
  if (term.acyclic) rep.longest_path = longest_path(tg, term);
  rep.sinks = check_sinks(tg, g);
  rep.sink_count = rep.sinks.sink_count;
  rep.legitimate_count = rep.sinks.legitimate_count;
  rep.sinks_match = rep.sinks.ok;
  return rep;
}

/// Every connected graph on n labelled nodes (root 0), by brute force over
/// edge subsets. No isomorphism reduction.
inline std::vector<Graph> all_connected_graphs(std::size_t n) {
  if (n < 2 || n > 6) throw Error("graph census supports 2..6 nodes");
  std::vector<Edge> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  std::vector<Graph> out;
  std::vector<Edge> edges;
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << pairs.size()); ++mask) {
    edges.clear();
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask >> i & 1) edges.push_back(pairs[i]);
    if (edges.size() + 1 < n) continue;
    try {
      out.push_back(Graph::from_edges(n, edges));
    } catch (const GraphError&) {
    }
  }
  return out;
}

}  // namespace stabsim
