#pragma once

// Worst-case executions as (graph, initial configuration, schedule,
// expected counts), plus the recursive phase generator for the G_k family.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabsim/algorithm.hpp"
#include "stabsim/daemon.hpp"
#include "stabsim/engine.hpp"
#include "stabsim/error.hpp"
#include "stabsim/graph.hpp"
#include "stabsim/verifier.hpp"

namespace stabsim {

struct CountExpectation {
  std::size_t value = 0;
  bool exact = true;  // otherwise a lower bound
  bool holds(std::size_t measured) const noexcept { return exact ? measured == value : measured >= value; }
  friend bool operator==(const CountExpectation&, const CountExpectation&) = default;
};

/// Whether expected counts refer to the scripted prefix or the whole run.
enum class CountScope : std::uint8_t { Full, Prefix };

struct Expectation {
  std::optional<CountExpectation> rounds;
  std::optional<CountExpectation> steps;
  CountScope scope = CountScope::Full;
  friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct Scenario {
  std::string name;
  AlgorithmSpec spec;
  Graph graph;
  Configuration init;
  DaemonStrategy strategy;
  Expectation expected;

  const Scripted* script() const { return std::get_if<Scripted>(&strategy); }
  std::size_t script_length() const {
    auto* s = script();
    return s ? s->length() : 0;
  }
};

// ---------------------------------------------------------------------------
// Unbounded line

/// Five-node line under U with d_{p_1} = d_{p_4} = X and d_{p_2} = d_{p_3} = 1.
/// p_2 and p_3 alternate U1 for X+1 steps, after which both hold X+1; a
/// synchronous tail finishes the execution.
inline Scenario scenario_unbounded_line(std::uint32_t X) {
  if (X < 5) throw Error("unbounded line scenario requires X >= 5");
  Graph g = build_line(4);
  Configuration init(g.node_count());
  init.set(1, X, 0);
  init.set(2, 1, 1);
  init.set(3, 1, 2);
  init.set(4, X, 3);
  const Schedule script{{{2, RuleId::U1}}, {{3, RuleId::U1}}};
  Expectation ex;
  ex.steps = CountExpectation{X, false};
  ex.scope = CountScope::Prefix;
  return {"unbounded-line:X=" + std::to_string(X), AlgorithmSpec::U(), std::move(g), std::move(init),
          Scripted{script, Synchronous{}, std::size_t(X) + 1}, ex};
}

// ---------------------------------------------------------------------------
// HC slow rounds

inline Graph build_hc_slow_graph() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  return Graph::from_edges(3, edges, {"R", "a", "b"});
}

/// HC1 has priority: rounds 1..k-1 are {b:HC1} then {a:HC1}, round k is
/// {a:HC2}, round k+1 is {b:HC1}.
inline Schedule hc_slow_script(std::uint32_t k) {
  constexpr NodeId a = 1, b = 2;
  Schedule s;
  for (std::uint32_t r = 1; r < k; ++r) {
    s.push_back({{b, RuleId::HC1}});
    s.push_back({{a, RuleId::HC1}});
  }
  s.push_back({{a, RuleId::HC2}});
  s.push_back({{b, RuleId::HC1}});
  return s;
}

/// Searches R-a-b configurations of HC(2k) for one where hc_slow_script(k)
/// replays to a legitimate terminal configuration in exactly k+1 rounds and
/// 2k steps. Configurations with both HC1 and HC2 enabled at a are preferred.
inline Configuration hc_slow_initial(std::uint32_t k) {
  const Graph g = build_hc_slow_graph();
  const auto spec = AlgorithmSpec::HC(2 * k);
  const Schedule script = hc_slow_script(k);
  for (bool need_both : {true, false}) {
    for (std::uint32_t da = 1; da <= 2 * k; ++da)
      for (std::uint32_t db = 1; db <= 2 * k; ++db)
        for (NodeId par_a : {NodeId(0), NodeId(2)}) {
          Configuration c(3);
          c.set(1, da, par_a);
          c.set(2, db, 1);
          const auto at_a = enabled_rules(spec, g, c, 1);
          if (need_both && !(at_a.contains(RuleId::HC1) && at_a.contains(RuleId::HC2))) continue;
          RunOptions opts;
          opts.step_budget = script.size();
          const auto t = run(spec, g, c, Scripted{script, std::nullopt}, opts);
          if (t.outcome == Outcome::Terminal && t.step_count == 2 * k && t.round_count == k + 1 &&
              is_legitimate(g, t.final_config))
            return c;
        }
  }
  throw Error("no initial configuration reproduces the slow HC execution for k=" + std::to_string(k));
}

inline Scenario scenario_hc_slow(std::uint32_t k) {
  if (k < 1) throw Error("slow HC scenario requires k >= 1");
  Expectation ex;
  ex.rounds = CountExpectation{k + 1, true};
  ex.steps = CountExpectation{2 * std::size_t(k), true};
  return {"hc-slow:k=" + std::to_string(k), AlgorithmSpec::HC(2 * k), build_hc_slow_graph(), hc_slow_initial(k),
          Scripted{hc_slow_script(k), std::nullopt}, ex};
}

// ---------------------------------------------------------------------------
// Synchronous round-optimal executions

/// Line of diameter diam, all non-root d = X (default diam+1), U synchronous.
inline Scenario scenario_sync_u_line(std::uint32_t diam, std::optional<std::uint32_t> X = std::nullopt) {
  if (diam < 1) throw Error("line diameter must be at least 1");
  const std::uint32_t x = X.value_or(diam + 1);
  if (x <= diam) throw Error("initial value X must exceed the diameter");
  Graph g = build_line(diam);
  Configuration init(g.node_count());
  for (NodeId p = 1; p <= diam; ++p) init.set(p, x, p - 1);
  Expectation ex;
  ex.rounds = CountExpectation{diam, true};
  ex.steps = CountExpectation{diam, true};
  return {"sync-u-line:diam=" + std::to_string(diam) + ",X=" + std::to_string(x), AlgorithmSpec::U(), std::move(g),
          std::move(init), Synchronous{}, ex};
}

/// Lollipop of diameter diam under B(D), all non-root d = D and the two
/// chord-end processes p_diam and p_{diam+1} pointing at each other.
inline Scenario scenario_sync_b_lollipop(std::uint32_t diam, std::uint32_t D) {
  if (D < diam) throw Error("B lollipop scenario requires D >= diameter");
  Graph g = build_lollipop(diam);
  Configuration init(g.node_count());
  for (NodeId p = 1; p < diam; ++p) init.set(p, D, p - 1);
  init.set(diam, D, diam + 1);
  init.set(diam + 1, D, diam);
  Expectation ex;
  ex.rounds = CountExpectation{diam, true};
  ex.steps = CountExpectation{diam, true};
  return {"sync-b-lollipop:diam=" + std::to_string(diam) + ",D=" + std::to_string(D), AlgorithmSpec::B(D),
          std::move(g), std::move(init), Synchronous{}, ex};
}

/// Lollipop of diameter diam under FHC(diam), synchronous, diam+1 rounds.
inline Scenario scenario_sync_fhc_lollipop(std::uint32_t diam) {
  Graph g = build_lollipop(diam);
  Configuration init(g.node_count());
  for (NodeId p = 1; p + 2 <= diam; ++p) init.set(p, diam, p - 1);
  init.set(diam - 1, diam, diam + 1);
  init.set(diam, diam, diam + 1);
  init.set(diam + 1, diam - 1, diam - 1);
  Expectation ex;
  ex.rounds = CountExpectation{diam + 1, true};
  ex.steps = CountExpectation{diam + 1, true};
  return {"sync-fhc-lollipop:diam=" + std::to_string(diam), AlgorithmSpec::FHC(diam), std::move(g), std::move(init),
          Synchronous{}, ex};
}

// ---------------------------------------------------------------------------
// Exponential executions on G_k

/// Canonical member of Conf_c_i(v, z): levels below i sit at (z, z), e.i = v,
/// every e.j above i holds 1, fixtures hold z-1.
inline Configuration conf_c_configuration(const Graph& gk, std::uint32_t i, std::uint32_t v, std::uint32_t z) {
  using Id = GkIds;
  const auto k = gk_order(gk);
  if (i < 1 || i > k || v < 1 || v > z || z < 2) throw Error("invalid Conf_c parameters");
  Configuration c(gk.node_count());
  c.set(Id::h0(), z - 1, Id::root());
  c.set(Id::f0(), z, Id::h0());
  for (std::uint32_t j = 1; j <= k; ++j) {
    c.set(Id::g(j), z - 1, Id::e(j));
    c.set(Id::h(j), z - 1, Id::f(j));
    c.set(Id::f(j), z, Id::h(j));
    const std::uint32_t de = j < i ? z : j == i ? v : 1;
    c.set(Id::e(j), de, de == z ? Id::g(j) : Id::f(j));
  }
  return c;
}

/// Drives G_i through the HC2-only oscillations, appending every step to an
/// internal schedule and checking the configuration class at each boundary.
class PhaseGenerator {
 public:
  PhaseGenerator(const Graph& gk, AlgorithmSpec spec, Configuration start, bool check_classes = true)
      : g_(gk), spec_(spec), conf_(std::move(start)), check_(check_classes) {
    gk_order(gk);
  }

  /// From Conf_c_i(v, z) to Conf_c_i(z, z). Returns the number of steps.
  std::size_t exec_phase(std::uint32_t i, std::uint32_t v, std::uint32_t z) {
    if (v > z || (z - v) % 2 != 0) throw Error("phase requires v <= z with z - v even");
    const std::size_t before = schedule_.size();
    using Id = GkIds;
    while (v < z) {
      expect(ConfClass::C, i, v, z, "phase start");
      do_step({Id::e(i), Id::f(i - 1)}, i, v, z);
      expect(ConfClass::B, i, v + 1, z, "after first step");
      if (i >= 2) do_step({Id::e(i), Id::e(i - 1), Id::f(i - 1)}, i, v, z);
      else do_step({Id::e(i), Id::f(i - 1)}, i, v, z);
      v += 2;
      expect(i == 1 ? ConfClass::C : ConfClass::A, i, v, z, "after second step");
      if (i >= 2) exec_phase(i - 1, v, z);
    }
    expect(ConfClass::C, i, z, z, "phase end");
    return schedule_.size() - before;
  }

  const Schedule& schedule() const noexcept { return schedule_; }
  const Configuration& config() const noexcept { return conf_; }

 private:
  void do_step(std::initializer_list<NodeId> candidates, std::uint32_t i, std::uint32_t v, std::uint32_t z) {
    MoveSet moves;
    for (NodeId p : candidates)
      if (enabled_rules(spec_, g_, conf_, p).contains(RuleId::HC2)) moves.push_back({p, RuleId::HC2});
    if (moves.empty()) throw Error("phase " + coords(i, v, z) + ": no candidate has HC2 enabled");
    conf_ = step(spec_, g_, conf_, moves, schedule_.size());
    schedule_.push_back(std::move(moves));
  }

  void expect(ConfClass cls, std::uint32_t i, std::uint32_t x, std::uint32_t z, const char* where) const {
    if (check_ && !in_conf_class(g_, conf_, cls, i, x, z))
      throw Error("phase " + coords(i, x, z) + ": configuration not in class " + std::string(to_string(cls)) +
                  " " + where);
  }

  static std::string coords(std::uint32_t i, std::uint32_t v, std::uint32_t z) {
    return "(i=" + std::to_string(i) + ", v=" + std::to_string(v) + ", z=" + std::to_string(z) + ")";
  }

  const Graph& g_;
  AlgorithmSpec spec_;
  Configuration conf_;
  bool check_;
  Schedule schedule_;
};

/// Measured number of steps from Conf_c_i(v, z) to Conf_c_i(z, z) on G_k.
inline std::size_t measure_const(std::uint32_t k, std::uint32_t i, std::uint32_t v, std::uint32_t z) {
  const Graph gk = build_gk(k);
  PhaseGenerator gen(gk, AlgorithmSpec::HC(z), conf_c_configuration(gk, i, v, z));
  return gen.exec_phase(i, v, z);
}

struct ExponentialPlan {
  Configuration init;
  Schedule schedule;  // every move is HC2
  std::vector<std::size_t> phase_steps;  // phase_steps[j-1] = length of phase e_j
  Configuration end;  // member of Conf_c_k(z, z)
};

/// e_1 .. e_k concatenated on G_k with z = 2k+3.
inline ExponentialPlan exponential_plan(std::uint32_t k, std::uint32_t D) {
  const std::uint32_t z = 2 * k + 3;
  if (D < z) throw Error("exponential scenario requires D >= 2k+3");
  const Graph gk = build_gk(k);
  ExponentialPlan plan;
  plan.init = conf_c_configuration(gk, 1, 1, z);
  PhaseGenerator gen(gk, AlgorithmSpec::HC(D), plan.init);
  for (std::uint32_t j = 1; j <= k; ++j) plan.phase_steps.push_back(gen.exec_phase(j, 1, z));
  plan.schedule = gen.schedule();
  plan.end = gen.config();
  return plan;
}

/// (2k+2)(2^k - 1).
inline std::uint64_t exponential_lower_bound(std::uint32_t k) {
  return (2 * std::uint64_t(k) + 2) * ((std::uint64_t(1) << k) - 1);
}

/// Rewrites an HC2-only schedule as B moves: B1 where dOk fails, B2
/// otherwise. The schedule is replayed under `hc_spec` to know each
/// pre-step configuration.
inline Schedule map_hc2_schedule_to_b(const Graph& g, const AlgorithmSpec& hc_spec, const Configuration& init,
                                      const Schedule& schedule) {
  Schedule out;
  out.reserve(schedule.size());
  Configuration conf = init;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    MoveSet mapped;
    for (const auto& m : schedule[s]) {
      if (m.rule != RuleId::HC2) throw Error("schedule contains a rule other than HC2 at step " + std::to_string(s));
      mapped.push_back({m.process, d_ok(g, conf, m.process) ? RuleId::B2 : RuleId::B1});
    }
    conf = step(hc_spec, g, conf, schedule[s], s);
    out.push_back(std::move(mapped));
  }
  return out;
}

/// The exponential execution under HC(D), FHC(D) or B(D) (moves mapped),
/// followed by a synchronous tail.
inline Scenario scenario_exponential(std::uint32_t k, std::optional<std::uint32_t> D = std::nullopt,
                                     Variant variant = Variant::HC) {
  if (k < 1) throw Error("exponential scenario requires k >= 1");
  const std::uint32_t d = D.value_or(2 * k + 3);
  auto plan = exponential_plan(k, d);
  Graph gk = build_gk(k);
  AlgorithmSpec spec;
  switch (variant) {
    case Variant::HC: spec = AlgorithmSpec::HC(d); break;
    case Variant::FHC: spec = AlgorithmSpec::FHC(d); break;
    case Variant::B:
      spec = AlgorithmSpec::B(d);
      plan.schedule = map_hc2_schedule_to_b(gk, AlgorithmSpec::HC(d), plan.init, plan.schedule);
      break;
    case Variant::U: throw Error("exponential scenario is defined for bounded variants only");
  }
  Expectation ex;
  ex.steps = CountExpectation{static_cast<std::size_t>(exponential_lower_bound(k)), false};
  ex.scope = CountScope::Prefix;
  std::string name = "exponential:k=" + std::to_string(k) + ",D=" + std::to_string(d);
  if (variant != Variant::HC) name += ",variant=" + std::string(to_string(variant));
  return {std::move(name), spec, std::move(gk), std::move(plan.init), Scripted{std::move(plan.schedule), Synchronous{}},
          ex};
}

// ---------------------------------------------------------------------------
// Playback

struct ScenarioRun {
  ExecutionTrace trace;
  std::size_t prefix_steps = 0;
  std::size_t prefix_rounds = 0;  // rounds closed within the scripted prefix
  bool terminal_legitimate = false;
  TreeDefect tree = TreeDefect::None;
  std::string failure;  // empty when every expectation holds
  bool ok() const noexcept { return failure.empty(); }
};

/// Runs the scenario; `tail_budget` bounds the steps after the script.
inline ScenarioRun play_scenario(const Scenario& s, std::size_t tail_budget = 1'000'000, bool record = true) {
  ScenarioRun out;
  RunOptions opts;
  opts.step_budget = s.script_length() + tail_budget;
  opts.record_trace = record;
  out.trace = run(s.spec, s.graph, s.init, s.strategy, opts);
  const auto& t = out.trace;
  out.prefix_steps = std::min(t.step_count, s.script_length());
  out.prefix_rounds = static_cast<std::size_t>(
      std::upper_bound(t.round_boundaries.begin(), t.round_boundaries.end(), out.prefix_steps) -
      t.round_boundaries.begin());

  auto fail = [&](std::string why) {
    if (out.failure.empty()) out.failure = std::move(why);
  };
  if (t.outcome != Outcome::Terminal) {
    fail("outcome " + std::string(to_string(t.outcome)) +
         (t.violation_reason.empty() ? std::string() : ": " + t.violation_reason));
  } else {
    out.terminal_legitimate = is_legitimate(s.graph, t.final_config);
    out.tree = verify_bfs_tree(s.graph, extract_tree(s.graph, t.final_config)).defect;
    if (!out.terminal_legitimate) fail("terminal configuration is not legitimate");
    if (out.tree != TreeDefect::None) fail("tree check failed: " + std::string(to_string(out.tree)));
  }
  if (t.step_count < s.script_length()) fail("script not fully played");
  const bool prefix = s.expected.scope == CountScope::Prefix;
  const auto steps = prefix ? out.prefix_steps : t.step_count;
  const auto rounds = prefix ? out.prefix_rounds : t.round_count;
  if (s.expected.steps && !s.expected.steps->holds(steps))
    fail("expected " + std::string(s.expected.steps->exact ? "" : ">= ") + std::to_string(s.expected.steps->value) +
         " steps, measured " + std::to_string(steps));
  if (s.expected.rounds && !s.expected.rounds->holds(rounds))
    fail("expected " + std::string(s.expected.rounds->exact ? "" : ">= ") +
         std::to_string(s.expected.rounds->value) + " rounds, measured " + std::to_string(rounds));
  return out;
}

// ---------------------------------------------------------------------------
// Name lookup: "family:key=value,key=value"

namespace detail {

inline std::map<std::string, std::string, std::less<>> parse_kv(std::string_view args, std::string_view what) {
  std::map<std::string, std::string, std::less<>> out;
  while (!args.empty()) {
    const auto comma = args.find(',');
    const auto item = args.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) throw Error("malformed parameter '" + std::string(item) + "' in " + std::string(what));
    out.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    args = comma == std::string_view::npos ? std::string_view{} : args.substr(comma + 1);
  }
  return out;
}

inline std::uint32_t to_u32(std::string_view s, std::string_view key) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("parameter " + std::string(key) + " is not a non-negative integer");
  return v;
}

}  // namespace detail

inline const std::vector<std::string_view>& scenario_families() {
  static const std::vector<std::string_view> names{"unbounded-line", "hc-slow", "sync-u-line", "sync-b-lollipop",
                                                   "sync-fhc-lollipop", "exponential"};
  return names;
}

inline Scenario scenario_by_name(std::string_view text) {
  const auto colon = text.find(':');
  const auto family = text.substr(0, colon);
  auto kv = detail::parse_kv(colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1), text);
  auto take = [&](std::string_view key) -> std::optional<std::uint32_t> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = detail::to_u32(it->second, key);
    kv.erase(it);
    return v;
  };
  auto need = [&](std::string_view key) {
    auto v = take(key);
    if (!v) throw Error("scenario " + std::string(family) + " needs parameter " + std::string(key));
    return *v;
  };
  std::optional<Scenario> s;
  if (family == "unbounded-line") s = scenario_unbounded_line(need("X"));
  else if (family == "hc-slow") s = scenario_hc_slow(need("k"));
  else if (family == "sync-u-line") {
    const auto diam = need("diam");
    s = scenario_sync_u_line(diam, take("X"));
  } else if (family == "sync-b-lollipop") {
    const auto diam = need("diam");
    s = scenario_sync_b_lollipop(diam, take("D").value_or(diam));
  } else if (family == "sync-fhc-lollipop") s = scenario_sync_fhc_lollipop(need("diam"));
  else if (family == "exponential") {
    Variant v = Variant::HC;
    if (auto it = kv.find("variant"); it != kv.end()) {
      auto parsed = parse_variant(it->second);
      if (!parsed) throw Error("unknown variant " + it->second);
      v = *parsed;
      kv.erase(it);
    }
    const auto k = need("k");
    s = scenario_exponential(k, take("D"), v);
  } else {
    throw Error("unknown scenario family '" + std::string(family) + "'");
  }
  if (!kv.empty()) throw Error("unknown parameter '" + kv.begin()->first + "' for scenario " + std::string(family));
  return std::move(*s);
}

}  // namespace stabsim
