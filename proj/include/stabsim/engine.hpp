#pragma once

// Execution loop with exact step and round accounting.
//
// A step applies every chosen move against the pre-step configuration
// (composite atomicity). A round ends at the first step after which every
// process enabled at the round's start has either executed or been
// neutralized; a process that executes is removed for executing even if it
// would also count as neutralized.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stabsim/algorithm.hpp"
#include "stabsim/daemon.hpp"
#include "stabsim/error.hpp"
#include "stabsim/graph.hpp"

namespace stabsim {

enum class Outcome : std::uint8_t { Terminal, StepBudgetExceeded, ScheduleViolation, ScheduleExhausted };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Terminal: return "terminal";
    case Outcome::StepBudgetExceeded: return "budget-exceeded";
    case Outcome::ScheduleViolation: return "schedule-violation";
    case Outcome::ScheduleExhausted: return "schedule-exhausted";
  }
  return "?";
}

inline std::optional<Outcome> parse_outcome(std::string_view s) {
  for (auto o : {Outcome::Terminal, Outcome::StepBudgetExceeded, Outcome::ScheduleViolation,
                 Outcome::ScheduleExhausted})
    if (to_string(o) == s) return o;
  return std::nullopt;
}

/// A move together with the state it wrote.
struct AppliedMove {
  Move move;
  ProcessState after;
  friend bool operator==(const AppliedMove&, const AppliedMove&) = default;
};

/// Processes enabled at the start of the current round that have neither
/// executed nor been neutralized yet.
class RoundTracker {
 public:
  void start(const EnabledMap& enabled) {
    pending_.assign(enabled.size(), false);
    count_ = 0;
    for (NodeId p = 0; p < enabled.size(); ++p)
      if (!enabled[p].empty()) {
        pending_[p] = true;
        ++count_;
      }
  }

  /// Returns true when the round closes with this step.
  bool after_step(std::span<const Move> executed, const EnabledMap& enabled_after) {
    for (const auto& m : executed) drop(m.process);
    for (NodeId p = 0; p < pending_.size(); ++p)
      if (pending_[p] && enabled_after[p].empty()) drop(p);
    return count_ == 0;
  }

  bool pending(NodeId p) const { return pending_[p]; }
  std::size_t pending_count() const noexcept { return count_; }

 private:
  void drop(NodeId p) {
    if (pending_[p]) {
      pending_[p] = false;
      --count_;
    }
  }
  std::vector<bool> pending_;
  std::size_t count_ = 0;
};

/// Record of one execution. Full configurations are kept every
/// kSnapshotInterval steps; anything in between is rebuilt from the
/// per-move written states.
class ExecutionTrace {
 public:
  static constexpr std::size_t kSnapshotInterval = 64;

  Configuration initial;
  Configuration final_config;
  std::size_t step_count = 0;
  std::size_t round_count = 0;
  /// round_boundaries[r] = number of steps executed when round r+1 closed.
  std::vector<std::size_t> round_boundaries;
  Outcome outcome = Outcome::Terminal;
  /// Set when outcome is ScheduleViolation.
  std::string violation_reason;
  MoveSet violation_moves;
  bool recorded = true;

  std::span<const AppliedMove> step_moves(std::size_t step) const {
    return {applied_.data() + offsets_[step], offsets_[step + 1] - offsets_[step]};
  }
  MoveSet moves(std::size_t step) const {
    MoveSet out;
    for (const auto& a : step_moves(step)) out.push_back(a.move);
    return out;
  }
  std::span<const AppliedMove> all_applied() const noexcept { return applied_; }

  /// Configuration after `steps` steps (0 = initial).
  Configuration config_at(std::size_t steps) const {
    if (!recorded) throw Error("trace was run without recording");
    if (steps > step_count) throw Error("step index past end of trace");
    const std::size_t snap = steps / kSnapshotInterval;
    Configuration conf = snapshots_[snap];
    for (std::size_t s = snap * kSnapshotInterval; s < steps; ++s)
      for (const auto& a : step_moves(s)) conf[a.move.process] = a.after;
    return conf;
  }

  /// 1-based round index that contains 0-based step `step`. Steps of an
  /// unfinished final round get round_count + 1.
  std::size_t round_of_step(std::size_t step) const {
    auto it = std::upper_bound(round_boundaries.begin(), round_boundaries.end(), step);
    return static_cast<std::size_t>(it - round_boundaries.begin()) + 1;
  }

  void begin(const Configuration& init, bool record) {
    initial = init;
    recorded = record;
    applied_.clear();
    offsets_.assign(1, 0);
    snapshots_.clear();
    if (record) snapshots_.push_back(init);
  }

  void push_step(std::span<const AppliedMove> moves, const Configuration& after) {
    ++step_count;
    if (!recorded) return;
    applied_.insert(applied_.end(), moves.begin(), moves.end());
    offsets_.push_back(applied_.size());
    if (step_count % kSnapshotInterval == 0) snapshots_.push_back(after);
  }

  /// Mutable access for fault-injection tests.
  std::vector<AppliedMove>& mutable_applied() { return applied_; }

 private:
  std::vector<AppliedMove> applied_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Configuration> snapshots_;
};

/// Observation hook called after every step.
struct StepEvent {
  std::size_t step_count;  // steps executed so far
  const Configuration& config;
  std::span<const AppliedMove> moves;
  bool round_closed;
  std::size_t round_count;  // closed rounds so far
};

/// Product over non-root p of D * deg(p): the number of configurations of a
/// bounded variant. Empty for U or on 64-bit overflow.
inline std::optional<std::uint64_t> state_space_size(const AlgorithmSpec& spec, const Graph& g) {
  if (!spec.bounded()) return std::nullopt;
  std::uint64_t prod = 1;
  for (NodeId p = 1; p < g.node_count(); ++p) {
    const std::uint64_t s = std::uint64_t(spec.D) * g.degree(p);
    if (s != 0 && prod > std::numeric_limits<std::uint64_t>::max() / s) return std::nullopt;
    prod *= s;
  }
  return prod;
}

inline constexpr std::uint64_t kMaxDefaultBudget = 1'000'000'000;

/// Number of configurations minus two when that is below 10^9, otherwise
/// empty (the caller must supply a budget).
inline std::optional<std::size_t> default_step_budget(const AlgorithmSpec& spec, const Graph& g) {
  const auto size = state_space_size(spec, g);
  if (!size || *size >= kMaxDefaultBudget + 2) return std::nullopt;
  return static_cast<std::size_t>(*size < 2 ? 0 : *size - 2);
}

struct RunOptions {
  std::size_t step_budget = 1'000'000;
  bool record_trace = true;
  std::function<void(const StepEvent&)> on_step;
};

/// Successor of `conf` when all `moves` execute simultaneously. Throws
/// ScheduleViolation (step index `step_index`) if any move is not enabled.
inline Configuration step(const AlgorithmSpec& spec, const Graph& g, const Configuration& conf,
                          const MoveSet& moves, std::size_t step_index = 0) {
  const auto enabled = compute_enabled(spec, g, conf);
  Move bad;
  if (auto why = check_moves(enabled, moves, &bad); !why.empty()) throw ScheduleViolation(step_index, bad, why);
  Configuration next = conf;
  for (const auto& m : moves) next[m.process] = rule_effect(spec, g, conf, m.process, m.rule);
  return next;
}

inline ExecutionTrace run(const AlgorithmSpec& spec, const Graph& g, const Configuration& init, Daemon& daemon,
                          const RunOptions& options = {}) {
  spec.validate();
  if (auto why = check_configuration(spec, g, init); !why.empty()) throw Error("invalid initial configuration: " + why);

  ExecutionTrace trace;
  trace.begin(init, options.record_trace);
  Configuration conf = init;
  EnabledMap enabled = compute_enabled(spec, g, conf);
  RoundTracker tracker;
  tracker.start(enabled);
  std::vector<AppliedMove> applied;

  auto any_enabled = [](const EnabledMap& e) {
    return std::any_of(e.begin(), e.end(), [](RuleSet r) { return !r.empty(); });
  };

  while (true) {
    if (!any_enabled(enabled)) {
      trace.outcome = Outcome::Terminal;
      break;
    }
    if (trace.step_count >= options.step_budget) {
      trace.outcome = Outcome::StepBudgetExceeded;
      break;
    }
    MoveSet moves;
    try {
      moves = daemon.choose(spec, enabled, trace.step_count);
    } catch (const ScheduleViolation& v) {
      trace.outcome = Outcome::ScheduleViolation;
      trace.violation_reason = v.reason();
      if (auto* s = std::get_if<Scripted>(&daemon.strategy()); s && daemon.script_position() < s->schedule.size())
        trace.violation_moves = s->schedule[daemon.script_position()];
      break;
    } catch (const ScheduleExhausted&) {
      trace.outcome = Outcome::ScheduleExhausted;
      break;
    }
    if (auto why = check_moves(enabled, moves); !why.empty()) {
      trace.outcome = Outcome::ScheduleViolation;
      trace.violation_reason = why;
      trace.violation_moves = moves;
      break;
    }
    applied.clear();
    for (const auto& m : moves) applied.push_back({m, rule_effect(spec, g, conf, m.process, m.rule)});
    for (const auto& a : applied) conf[a.move.process] = a.after;
    trace.push_step(applied, conf);

    enabled = compute_enabled(spec, g, conf);
    const bool closed = tracker.after_step(moves, enabled);
    if (closed) {
      ++trace.round_count;
      trace.round_boundaries.push_back(trace.step_count);
      tracker.start(enabled);
    }
    if (options.on_step) options.on_step(StepEvent{trace.step_count, conf, applied, closed, trace.round_count});
  }
  trace.final_config = conf;
  return trace;
}

inline ExecutionTrace run(const AlgorithmSpec& spec, const Graph& g, const Configuration& init,
                          const DaemonStrategy& strategy, const RunOptions& options = {}) {
  Daemon daemon(strategy);
  return run(spec, g, init, daemon, options);
}

struct ReplayReport {
  bool ok = true;
  std::optional<std::size_t> diverged_at;  // 0-based step index
  std::string reason;
  explicit operator bool() const noexcept { return ok; }
};

/// Re-executes the recorded moves from the initial configuration and checks
/// every written state, the snapshots, the round boundaries and the outcome.
inline ReplayReport replay(const ExecutionTrace& trace, const AlgorithmSpec& spec, const Graph& g) {
  auto fail = [](std::optional<std::size_t> at, std::string why) { return ReplayReport{false, at, std::move(why)}; };
  if (!trace.recorded) return fail(std::nullopt, "trace was run without recording");
  if (auto why = check_configuration(spec, g, trace.initial); !why.empty()) return fail(0, why);

  Configuration conf = trace.initial;
  EnabledMap enabled = compute_enabled(spec, g, conf);
  RoundTracker tracker;
  tracker.start(enabled);
  std::vector<std::size_t> boundaries;
  for (std::size_t i = 0; i < trace.step_count; ++i) {
    const auto moves = trace.moves(i);
    if (auto why = check_moves(enabled, moves); !why.empty()) return fail(i, why);
    Configuration next = conf;
    for (const auto& a : trace.step_moves(i)) {
      const auto expect = rule_effect(spec, g, conf, a.move.process, a.move.rule);
      if (!(expect == a.after)) return fail(i, "recorded state of process " + g.name(a.move.process) + " differs");
      next[a.move.process] = expect;
    }
    conf = std::move(next);
    if ((i + 1) % ExecutionTrace::kSnapshotInterval == 0 && !(trace.config_at(i + 1) == conf))
      return fail(i, "snapshot mismatch");
    enabled = compute_enabled(spec, g, conf);
    if (tracker.after_step(moves, enabled)) {
      boundaries.push_back(i + 1);
      tracker.start(enabled);
    }
  }
  if (!(conf == trace.final_config)) return fail(trace.step_count, "final configuration differs");
  if (boundaries != trace.round_boundaries || boundaries.size() != trace.round_count)
    return fail(trace.step_count, "round accounting differs");
  const bool terminal = is_terminal(spec, g, conf);
  switch (trace.outcome) {
    case Outcome::Terminal:
      if (!terminal) return fail(trace.step_count, "trace claims termination but configuration is not terminal");
      break;
    case Outcome::ScheduleViolation:
      if (check_moves(enabled, trace.violation_moves).empty())
        return fail(trace.step_count, "recorded violating move-set is executable");
      break;
    case Outcome::StepBudgetExceeded:
    case Outcome::ScheduleExhausted:
      if (terminal) return fail(trace.step_count, "configuration is terminal but outcome is not");
      break;
  }
  return {};
}

}  // namespace stabsim
