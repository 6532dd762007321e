#pragma once

// The four BFS rule systems (U, B(D), HC(D), FHC(D)) as pure guard/action
// semantics over configurations.

#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabsim/error.hpp"
#include "stabsim/graph.hpp"
#include "stabsim/random.hpp"

namespace stabsim {

inline constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

enum class Variant : std::uint8_t { U, B, HC, FHC };

enum class RuleId : std::uint8_t { U1, U2, B1, B2, B3, HC1, HC2, FHC1 };
inline constexpr std::size_t kRuleCount = 8;

/// Which minimizing neighbor bestParent returns.
enum class TiePolicy : std::uint8_t { SmallestId, KeepCurrent };

/// Rule choice when HC1 and HC2 are both enabled at one process.
enum class PriorityPolicy : std::uint8_t { HC1First, HC2First, DaemonDecides };

/// Deliberately broken rule sets, used to show the checkers can fail.
///   DropB3      B(D) without rule B3.
///   SaturatingB B(D) where B1/B2 ignore the Min_d < D guard, B3 is gone and
///               update() clamps the written distance to D.
enum class Mutation : std::uint8_t { None, DropB3, SaturatingB };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::U: return "U";
    case Variant::B: return "B";
    case Variant::HC: return "HC";
    case Variant::FHC: return "FHC";
  }
  return "?";
}

inline std::string_view to_string(RuleId r) {
  static constexpr std::array<std::string_view, kRuleCount> names{"U1", "U2", "B1", "B2",
                                                                  "B3", "HC1", "HC2", "FHC1"};
  return names[static_cast<std::size_t>(r)];
}

inline std::string_view to_string(TiePolicy t) {
  return t == TiePolicy::SmallestId ? "smallest-id" : "keep-current";
}

inline std::string_view to_string(PriorityPolicy p) {
  switch (p) {
    case PriorityPolicy::HC1First: return "HC1-first";
    case PriorityPolicy::HC2First: return "HC2-first";
    case PriorityPolicy::DaemonDecides: return "daemon-decides";
  }
  return "?";
}

inline std::string_view to_string(Mutation m) {
  switch (m) {
    case Mutation::None: return "none";
    case Mutation::DropB3: return "drop-b3";
    case Mutation::SaturatingB: return "saturating-b";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "U") return Variant::U;
  if (s == "B") return Variant::B;
  if (s == "HC") return Variant::HC;
  if (s == "FHC") return Variant::FHC;
  return std::nullopt;
}

inline std::optional<RuleId> parse_rule(std::string_view s) {
  for (std::size_t i = 0; i < kRuleCount; ++i)
    if (to_string(static_cast<RuleId>(i)) == s) return static_cast<RuleId>(i);
  return std::nullopt;
}

inline std::optional<TiePolicy> parse_tie_policy(std::string_view s) {
  if (s == "smallest-id") return TiePolicy::SmallestId;
  if (s == "keep-current") return TiePolicy::KeepCurrent;
  return std::nullopt;
}

inline std::optional<PriorityPolicy> parse_priority_policy(std::string_view s) {
  if (s == "HC1-first") return PriorityPolicy::HC1First;
  if (s == "HC2-first") return PriorityPolicy::HC2First;
  if (s == "daemon-decides") return PriorityPolicy::DaemonDecides;
  return std::nullopt;
}

inline std::optional<Mutation> parse_mutation(std::string_view s) {
  if (s == "none") return Mutation::None;
  if (s == "drop-b3") return Mutation::DropB3;
  if (s == "saturating-b") return Mutation::SaturatingB;
  return std::nullopt;
}

struct AlgorithmSpec {
  Variant variant = Variant::U;
  std::uint32_t D = 0;  // unused for U
  TiePolicy tie_policy = TiePolicy::SmallestId;
  PriorityPolicy priority_policy = PriorityPolicy::HC2First;
  Mutation mutation = Mutation::None;

  static AlgorithmSpec U() { return {Variant::U, 0}; }
  static AlgorithmSpec B(std::uint32_t d) { return {Variant::B, d}; }
  static AlgorithmSpec HC(std::uint32_t d) { return {Variant::HC, d}; }
  static AlgorithmSpec FHC(std::uint32_t d) { return {Variant::FHC, d}; }

  bool bounded() const noexcept { return variant != Variant::U; }

  void validate() const {
    if (bounded() && D < 1) throw Error("bound D must be at least 1 for " + std::string(to_string(variant)));
    if (mutation != Mutation::None && variant != Variant::B)
      throw Error("rule-set mutations apply to variant B only");
  }

  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

inline bool rule_belongs_to(RuleId r, Variant v) {
  switch (v) {
    case Variant::U: return r == RuleId::U1 || r == RuleId::U2;
    case Variant::B: return r == RuleId::B1 || r == RuleId::B2 || r == RuleId::B3;
    case Variant::HC: return r == RuleId::HC1 || r == RuleId::HC2;
    case Variant::FHC: return r == RuleId::FHC1 || r == RuleId::HC2;
  }
  return false;
}

/// Small set of rule ids.
class RuleSet {
 public:
  constexpr RuleSet() = default;
  constexpr RuleSet(std::initializer_list<RuleId> rules) {
    for (auto r : rules) insert(r);
  }
  constexpr void insert(RuleId r) { bits_ |= bit(r); }
  constexpr bool contains(RuleId r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  std::vector<RuleId> to_vector() const {
    std::vector<RuleId> out;
    for (std::size_t i = 0; i < kRuleCount; ++i)
      if (bits_ & (1u << i)) out.push_back(static_cast<RuleId>(i));
    return out;
  }
  friend constexpr bool operator==(RuleSet, RuleSet) = default;

 private:
  static constexpr std::uint8_t bit(RuleId r) { return std::uint8_t(1u << static_cast<unsigned>(r)); }
  std::uint8_t bits_ = 0;
};

struct ProcessState {
  std::uint32_t d = 0;
  NodeId par = kNoParent;
  friend bool operator==(const ProcessState&, const ProcessState&) = default;
};

/// Per-process state vector indexed by node id. The root holds d = 0 and no
/// parent.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t n) : states_(n) {}
  explicit Configuration(std::vector<ProcessState> states) : states_(std::move(states)) {}

  std::size_t size() const noexcept { return states_.size(); }
  const ProcessState& operator[](NodeId p) const { return states_[p]; }
  ProcessState& operator[](NodeId p) { return states_[p]; }
  std::uint32_t d(NodeId p) const { return states_[p].d; }
  NodeId par(NodeId p) const { return states_[p].par; }
  void set(NodeId p, std::uint32_t d, NodeId par) { states_[p] = {d, par}; }
  const std::vector<ProcessState>& states() const noexcept { return states_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<ProcessState> states_;
};

/// Returns an empty string when `conf` is a valid configuration of `spec` on
/// `g`, otherwise a description of the first problem found.
inline std::string check_configuration(const AlgorithmSpec& spec, const Graph& g,
                                       const Configuration& conf) {
  if (conf.size() != g.node_count())
    return "configuration has " + std::to_string(conf.size()) + " states for " +
           std::to_string(g.node_count()) + " nodes";
  if (conf.d(kRoot) != 0 || conf.par(kRoot) != kNoParent) return "root state must be d=0 with no parent";
  for (NodeId p = 1; p < g.node_count(); ++p) {
    const auto& s = conf[p];
    if (s.par == kNoParent || !g.adjacent(p, s.par))
      return "par of node " + g.name(p) + " is not a neighbor";
    if (s.d < 1) return "d of node " + g.name(p) + " must be at least 1";
    if (spec.bounded() && s.d > spec.D)
      return "d of node " + g.name(p) + " exceeds D=" + std::to_string(spec.D);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Macros and predicates

inline std::uint32_t min_d(const Graph& g, const Configuration& conf, NodeId p) {
  std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
  for (NodeId q : g.neighbors(p)) m = std::min(m, conf.d(q));
  return m;
}

inline NodeId best_parent(const Graph& g, const Configuration& conf, NodeId p, TiePolicy tie) {
  const auto m = min_d(g, conf, p);
  if (tie == TiePolicy::KeepCurrent) {
    const NodeId cur = conf.par(p);
    if (cur != kNoParent && g.adjacent(p, cur) && conf.d(cur) == m) return cur;
  }
  for (NodeId q : g.neighbors(p))  // ascending ids
    if (conf.d(q) == m) return q;
  return kNoParent;  // unreachable for valid graphs
}

inline bool d_ok(const Graph& g, const Configuration& conf, NodeId p) {
  return std::uint64_t(conf.d(p)) == std::uint64_t(min_d(g, conf, p)) + 1;
}

inline bool par_ok(const Configuration& conf, NodeId p) {
  return std::uint64_t(conf.d(p)) == std::uint64_t(conf.d(conf.par(p))) + 1;
}

// ---------------------------------------------------------------------------
// Guards

inline RuleSet enabled_rules(const AlgorithmSpec& spec, const Graph& g, const Configuration& conf,
                             NodeId p) {
  RuleSet out;
  if (p == kRoot) return out;
  const auto m = min_d(g, conf, p);
  const bool dok = std::uint64_t(conf.d(p)) == std::uint64_t(m) + 1;
  const bool pok = par_ok(conf, p);
  const auto dpar = conf.d(conf.par(p));
  switch (spec.variant) {
    case Variant::U:
      if (!dok) out.insert(RuleId::U1);
      else if (!pok) out.insert(RuleId::U2);
      break;
    case Variant::B:
      if (spec.mutation == Mutation::SaturatingB) {
        if (!dok) out.insert(RuleId::B1);
        else if (!pok) out.insert(RuleId::B2);
        break;
      }
      if (m < spec.D) {
        if (!dok) out.insert(RuleId::B1);
        else if (!pok) out.insert(RuleId::B2);
      } else if (m == spec.D && conf.d(p) != spec.D && spec.mutation != Mutation::DropB3) {
        out.insert(RuleId::B3);
      }
      break;
    case Variant::HC:
      if (!pok && dpar < spec.D) out.insert(RuleId::HC1);
      if (dpar > m) out.insert(RuleId::HC2);
      break;
    case Variant::FHC:
      if (!pok && dpar < spec.D && dpar == m) out.insert(RuleId::FHC1);
      if (dpar > m) out.insert(RuleId::HC2);
      break;
  }
  return out;
}

/// Enabled rules of every process; the root entry is always empty.
using EnabledMap = std::vector<RuleSet>;

inline EnabledMap compute_enabled(const AlgorithmSpec& spec, const Graph& g, const Configuration& conf) {
  EnabledMap out(g.node_count());
  for (NodeId p = 1; p < g.node_count(); ++p) out[p] = enabled_rules(spec, g, conf, p);
  return out;
}

inline std::vector<NodeId> enabled_processes(const EnabledMap& enabled) {
  std::vector<NodeId> out;
  for (NodeId p = 0; p < enabled.size(); ++p)
    if (!enabled[p].empty()) out.push_back(p);
  return out;
}

inline bool is_terminal(const AlgorithmSpec& spec, const Graph& g, const Configuration& conf) {
  for (NodeId p = 1; p < g.node_count(); ++p)
    if (!enabled_rules(spec, g, conf, p).empty()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Actions

/// New state of `p` after executing `rule`, reading only `conf`. Does not
/// check the guard.
inline ProcessState rule_effect(const AlgorithmSpec& spec, const Graph& g, const Configuration& conf,
                                NodeId p, RuleId rule) {
  ProcessState s = conf[p];
  auto update = [&] {
    std::uint64_t next = std::uint64_t(min_d(g, conf, p)) + 1;
    if (spec.mutation == Mutation::SaturatingB) next = std::min<std::uint64_t>(next, spec.D);
    s.d = static_cast<std::uint32_t>(next);
    s.par = best_parent(g, conf, p, spec.tie_policy);
  };
  switch (rule) {
    case RuleId::U1:
    case RuleId::B1:
    case RuleId::HC2:
      update();
      break;
    case RuleId::U2:
    case RuleId::B2:
      s.par = best_parent(g, conf, p, spec.tie_policy);
      break;
    case RuleId::B3:
      s.d = spec.D;
      break;
    case RuleId::HC1:
    case RuleId::FHC1:
      s.d = conf.d(s.par) + 1;
      break;
  }
  return s;
}

inline Configuration apply_rule(const AlgorithmSpec& spec, const Graph& g, const Configuration& conf,
                                NodeId p, RuleId rule) {
  if (p == kRoot || p >= g.node_count() || !rule_belongs_to(rule, spec.variant) ||
      !enabled_rules(spec, g, conf, p).contains(rule))
    throw RuleNotEnabled("rule " + std::string(to_string(rule)) + " is not enabled at node " +
                         (p < g.node_count() ? g.name(p) : std::to_string(p)));
  Configuration next = conf;
  next[p] = rule_effect(spec, g, conf, p, rule);
  return next;
}

// ---------------------------------------------------------------------------
// Initial configurations

/// Uniform d in [1..D] ([1..d_cap] for U) and uniform par among neighbors.
inline Configuration random_configuration(const AlgorithmSpec& spec, const Graph& g, std::uint64_t seed,
                                          std::uint32_t d_cap_for_u = 0) {
  const std::uint32_t cap = spec.bounded() ? spec.D : d_cap_for_u;
  if (cap < 1) throw Error("random configuration needs a positive d cap");
  Rng rng(mix_seed(seed, 0x5eed));
  Configuration conf(g.node_count());
  for (NodeId p = 1; p < g.node_count(); ++p) {
    const auto nb = g.neighbors(p);
    const auto d = static_cast<std::uint32_t>(1 + uniform_below(rng, cap));
    const NodeId par = nb[uniform_below(rng, nb.size())];
    conf.set(p, d, par);
  }
  return conf;
}

/// The configuration with d = distance and par = smallest BFS predecessor.
inline Configuration legitimate_configuration(const Graph& g) {
  Configuration conf(g.node_count());
  for (NodeId p = 1; p < g.node_count(); ++p) {
    for (NodeId q : g.neighbors(p)) {
      if (g.distance(q) + 1 == g.distance(p)) {
        conf.set(p, g.distance(p), q);
        break;
      }
    }
  }
  return conf;
}

}  // namespace stabsim
