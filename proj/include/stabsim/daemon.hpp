#pragma once

// Daemon strategies: each step they pick a nonempty set of (process, rule)
// moves among the enabled ones. All strategies are refinements of the
// distributed unfair daemon; Scripted can starve any process forever.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "stabsim/algorithm.hpp"
#include "stabsim/error.hpp"
#include "stabsim/random.hpp"

namespace stabsim {

struct Move {
  NodeId process = kNoParent;
  RuleId rule = RuleId::U1;
  friend bool operator==(const Move&, const Move&) = default;
};

/// Moves of one step, at most one per process.
using MoveSet = std::vector<Move>;
using Schedule = std::vector<MoveSet>;

/// A move-set that cannot be executed: a move is not enabled, a process
/// appears twice, or the set is empty.
class ScheduleViolation : public Error {
 public:
  ScheduleViolation(std::size_t step, Move move, const std::string& reason)
      : Error("schedule violation at step " + std::to_string(step) + ": " + reason),
        step_(step), move_(move), reason_(reason) {}
  std::size_t step() const noexcept { return step_; }
  const Move& move() const noexcept { return move_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t step_;
  Move move_;
  std::string reason_;
};

/// A scripted schedule ran out while the configuration is not terminal.
class ScheduleExhausted : public Error {
 public:
  explicit ScheduleExhausted(std::size_t step)
      : Error("schedule exhausted at step " + std::to_string(step) + " before termination"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

enum class RulePreference : std::uint8_t { SpecDefault, HC1First, HC2First, Random };

struct Synchronous {
  RulePreference rule_pref = RulePreference::SpecDefault;
};
struct CentralRandom {
  std::uint64_t seed = 0;
};
struct DistributedRandom {
  std::uint64_t seed = 0;
  double activation_prob = 0.5;
};
/// Central daemon that always picks the smallest (or largest) enabled id.
struct CentralOrdered {
  bool highest_id_first = false;
};
using BaseSelection = std::variant<Synchronous, CentralRandom, DistributedRandom, CentralOrdered>;
/// Plays `schedule` verbatim, then hands over to `then` if set. A nonzero
/// `cycle_to` repeats the schedule cyclically until that many steps.
struct Scripted {
  Schedule schedule;
  std::optional<BaseSelection> then;
  std::size_t cycle_to = 0;

  std::size_t length() const noexcept { return cycle_to ? cycle_to : schedule.size(); }
  const MoveSet& at(std::size_t i) const { return schedule[cycle_to ? i % schedule.size() : i]; }
};
/// Process selection from `base`, rule choice forced by `rule_pref`.
struct Priority {
  BaseSelection base;
  RulePreference rule_pref = RulePreference::HC1First;
};

using DaemonStrategy =
    std::variant<Synchronous, CentralRandom, DistributedRandom, CentralOrdered, Scripted, Priority>;

inline std::string describe(const DaemonStrategy& s) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Synchronous>) return "sync";
        else if constexpr (std::is_same_v<T, CentralRandom>) return "central";
        else if constexpr (std::is_same_v<T, DistributedRandom>) return "distributed";
        else if constexpr (std::is_same_v<T, CentralOrdered>) return x.highest_id_first ? "central-max" : "central-min";
        else if constexpr (std::is_same_v<T, Scripted>) return "scripted";
        else return "priority";
      },
      s);
}

inline void validate(const DaemonStrategy& s) {
  auto check_prob = [](double p) {
    if (!(p > 0.0 && p <= 1.0)) throw Error("activation probability must lie in (0,1]");
  };
  if (auto* dr = std::get_if<DistributedRandom>(&s)) check_prob(dr->activation_prob);
  if (auto* pr = std::get_if<Priority>(&s))
    if (auto* dr = std::get_if<DistributedRandom>(&pr->base)) check_prob(dr->activation_prob);
  if (auto* sc = std::get_if<Scripted>(&s)) {
    if (sc->then)
      if (auto* dr = std::get_if<DistributedRandom>(&*sc->then)) check_prob(dr->activation_prob);
    for (std::size_t i = 0; i < sc->schedule.size(); ++i)
      if (sc->schedule[i].empty()) throw Error("scripted schedule has an empty move-set at step " + std::to_string(i));
    if (sc->cycle_to && sc->schedule.empty()) throw Error("cyclic script needs a non-empty schedule");
  }
}

/// Returns a description of why `moves` cannot be executed in a
/// configuration with `enabled`, or an empty string.
inline std::string check_moves(const EnabledMap& enabled, const MoveSet& moves, Move* offending = nullptr) {
  if (moves.empty()) return "empty move-set";
  std::vector<NodeId> seen;
  for (const auto& m : moves) {
    if (offending) *offending = m;
    if (m.process >= enabled.size()) return "process " + std::to_string(m.process) + " does not exist";
    if (std::find(seen.begin(), seen.end(), m.process) != seen.end())
      return "process " + std::to_string(m.process) + " moves twice";
    seen.push_back(m.process);
    if (!enabled[m.process].contains(m.rule))
      return "rule " + std::string(to_string(m.rule)) + " not enabled at process " + std::to_string(m.process);
  }
  return {};
}

namespace detail {

inline RuleId pick_rule(RulePreference pref, const AlgorithmSpec& spec, RuleSet rules, Rng& rng) {
  const auto options = rules.to_vector();
  if (options.size() == 1) return options.front();
  if (pref == RulePreference::SpecDefault) {
    switch (spec.priority_policy) {
      case PriorityPolicy::HC1First: pref = RulePreference::HC1First; break;
      case PriorityPolicy::HC2First: pref = RulePreference::HC2First; break;
      case PriorityPolicy::DaemonDecides: pref = RulePreference::Random; break;
    }
  }
  if (pref == RulePreference::HC1First && rules.contains(RuleId::HC1)) return RuleId::HC1;
  if (pref == RulePreference::HC2First && rules.contains(RuleId::HC2)) return RuleId::HC2;
  if (pref == RulePreference::Random) return options[uniform_below(rng, options.size())];
  return options.front();
}

inline std::vector<NodeId> select_processes(const BaseSelection& base, const std::vector<NodeId>& ready,
                                            Rng& rng) {
  return std::visit(
      [&](const auto& b) -> std::vector<NodeId> {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Synchronous>) {
          return ready;
        } else if constexpr (std::is_same_v<T, CentralRandom>) {
          return {ready[uniform_below(rng, ready.size())]};
        } else if constexpr (std::is_same_v<T, CentralOrdered>) {
          return {b.highest_id_first ? ready.back() : ready.front()};
        } else {
          std::vector<NodeId> out;
          for (NodeId p : ready)
            if (bernoulli(rng, b.activation_prob)) out.push_back(p);
          if (out.empty()) out.push_back(ready[uniform_below(rng, ready.size())]);
          return out;
        }
      },
      base);
}

inline std::uint64_t base_seed(const BaseSelection& base) {
  if (auto* c = std::get_if<CentralRandom>(&base)) return c->seed;
  if (auto* d = std::get_if<DistributedRandom>(&base)) return d->seed;
  return 0;
}

inline RulePreference base_rule_pref(const BaseSelection& base) {
  if (auto* s = std::get_if<Synchronous>(&base)) return s->rule_pref;
  if (std::holds_alternative<CentralRandom>(base)) return RulePreference::Random;
  return RulePreference::SpecDefault;
}

}  // namespace detail

/// Stateful wrapper around a strategy. Random choices depend only on the
/// seed, the step index and the enabled map; the only mutable state is the
/// scripted cursor.
class Daemon {
 public:
  explicit Daemon(DaemonStrategy strategy) : strategy_(std::move(strategy)) { validate(strategy_); }

  const DaemonStrategy& strategy() const noexcept { return strategy_; }
  bool scripted() const noexcept { return std::holds_alternative<Scripted>(strategy_); }
  std::size_t script_position() const noexcept { return cursor_; }
  std::size_t script_length() const {
    auto* s = std::get_if<Scripted>(&strategy_);
    return s ? s->length() : 0;
  }

  /// Precondition: at least one process is enabled. Throws ScheduleViolation
  /// or ScheduleExhausted for scripted strategies.
  MoveSet choose(const AlgorithmSpec& spec, const EnabledMap& enabled, std::size_t step_index) {
    BaseSelection base;
    RulePreference pref;
    if (auto* s = std::get_if<Scripted>(&strategy_)) {
      if (cursor_ < s->length()) {
        const MoveSet& moves = s->at(cursor_);
        Move bad;
        if (auto why = check_moves(enabled, moves, &bad); !why.empty())
          throw ScheduleViolation(step_index, bad, why);
        ++cursor_;
        return moves;
      }
      if (!s->then) throw ScheduleExhausted(step_index);
      base = *s->then;
      pref = detail::base_rule_pref(base);
    } else if (auto* p = std::get_if<Priority>(&strategy_)) {
      base = p->base;
      pref = p->rule_pref;
    } else {
      base = std::visit(
          [](const auto& x) -> BaseSelection {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Scripted> || std::is_same_v<T, Priority>) return Synchronous{};
            else return x;
          },
          strategy_);
      pref = detail::base_rule_pref(base);
    }
    const auto ready = enabled_processes(enabled);
    if (ready.empty()) throw Error("daemon invoked on a terminal configuration");
    Rng rng(mix_seed(detail::base_seed(base), step_index));
    MoveSet out;
    for (NodeId p : detail::select_processes(base, ready, rng))
      out.push_back({p, detail::pick_rule(pref, spec, enabled[p], rng)});
    return out;
  }

 private:
  DaemonStrategy strategy_;
  std::size_t cursor_ = 0;
};

/// One-shot form of Daemon::choose.
inline MoveSet choose(const DaemonStrategy& strategy, const AlgorithmSpec& spec, const EnabledMap& enabled,
                      std::size_t step_index = 0) {
  Daemon d(strategy);
  return d.choose(spec, enabled, step_index);
}

}  // namespace stabsim
