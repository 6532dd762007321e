#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace stabsim;

namespace {

struct Fixture {
  Graph g = build_line(4);
  AlgorithmSpec spec = AlgorithmSpec::U();
  Configuration c{5};
  Fixture() {
    c.set(1, 3, 0);
    c.set(2, 1, 1);
    c.set(3, 2, 2);
    c.set(4, 7, 3);
  }
  EnabledMap enabled() const { return compute_enabled(spec, g, c); }
};

}  // namespace

TEST_CASE("synchronous daemon activates every enabled process") {
  Fixture f;
  const auto e = f.enabled();
  const auto moves = choose(Synchronous{}, f.spec, e);
  std::vector<NodeId> who;
  for (auto m : moves) {
    who.push_back(m.process);
    CHECK(e[m.process].contains(m.rule));
  }
  CHECK(who == enabled_processes(e));
}

TEST_CASE("central daemons activate exactly one process") {
  Fixture f;
  const auto e = f.enabled();
  const auto ready = enabled_processes(e);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto m = choose(CentralRandom{s}, f.spec, e, s);
    REQUIRE(m.size() == 1);
    REQUIRE(std::find(ready.begin(), ready.end(), m[0].process) != ready.end());
  }
  CHECK(choose(CentralOrdered{false}, f.spec, e)[0].process == ready.front());
  CHECK(choose(CentralOrdered{true}, f.spec, e)[0].process == ready.back());
}

TEST_CASE("distributed daemon picks a non-empty subset and is reproducible") {
  Fixture f;
  const auto e = f.enabled();
  for (std::uint64_t s = 0; s < 100; ++s) {
    const DistributedRandom d{s, 0.3};
    const auto a = choose(d, f.spec, e, s);
    REQUIRE_FALSE(a.empty());
    REQUIRE(check_moves(e, a).empty());
    REQUIRE(a == choose(d, f.spec, e, s));
  }
  CHECK_THROWS_AS(Daemon(DistributedRandom{1, 0.0}), Error);
  CHECK_THROWS_AS(Daemon(DistributedRandom{1, 1.5}), Error);
}

TEST_CASE("scripted daemon rejects a disabled move at step 0") {
  Fixture f;
  const auto e = f.enabled();
  Daemon d(Scripted{{{{3, RuleId::U1}}}, std::nullopt});
  try {
    d.choose(f.spec, e, 0);
    FAIL("expected a violation");
  } catch (const ScheduleViolation& v) {
    CHECK(v.step() == 0);
    CHECK(v.move() == Move{3, RuleId::U1});
  }
}

TEST_CASE("scripted daemon rejects duplicates and empty sets and reports exhaustion") {
  Fixture f;
  const auto e = f.enabled();
  const auto p = enabled_processes(e).front();
  const auto r = e[p].to_vector().front();
  CHECK_FALSE(check_moves(e, {{p, r}, {p, r}}).empty());
  CHECK_FALSE(check_moves(e, {}).empty());
  CHECK_FALSE(check_moves(e, {{99, r}}).empty());
  CHECK_THROWS_AS(Daemon(Scripted{{{}}, std::nullopt}), Error);

  Daemon d(Scripted{{{{p, r}}}, std::nullopt});
  CHECK(d.choose(f.spec, e, 0).size() == 1);
  CHECK_THROWS_AS(d.choose(f.spec, e, 1), ScheduleExhausted);

  Daemon tail(Scripted{{{{p, r}}}, Synchronous{}});
  tail.choose(f.spec, e, 0);
  CHECK(tail.choose(f.spec, e, 1).size() == enabled_processes(e).size());

  Daemon cyclic(Scripted{{{{p, r}}}, std::nullopt, 3});
  CHECK(cyclic.script_length() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(cyclic.choose(f.spec, e, i) == MoveSet{{p, r}});
  CHECK_THROWS_AS(cyclic.choose(f.spec, e, 3), ScheduleExhausted);
  CHECK_THROWS_AS(Daemon(Scripted{{}, std::nullopt, 2}), Error);
}

TEST_CASE("rule preference when both HC rules are enabled") {
  // R - a - b, a has par b with d_b = 1 > d_R = 0, so HC2 is enabled;
  // d_a = 3 != d_b + 1 = 2 and d_b < D, so HC1 is enabled too.
  const auto g = build_line(2);
  Configuration c(3);
  c.set(1, 3, 2);
  c.set(2, 1, 1);
  auto spec = AlgorithmSpec::HC(3);
  const auto e = compute_enabled(spec, g, c);
  REQUIRE(e[1] == RuleSet{RuleId::HC1, RuleId::HC2});
  CHECK(choose(Priority{CentralOrdered{false}, RulePreference::HC1First}, spec, e)[0].rule == RuleId::HC1);
  CHECK(choose(Priority{CentralOrdered{false}, RulePreference::HC2First}, spec, e)[0].rule == RuleId::HC2);
  spec.priority_policy = PriorityPolicy::HC1First;
  CHECK(choose(CentralOrdered{false}, spec, e)[0].rule == RuleId::HC1);
  spec.priority_policy = PriorityPolicy::HC2First;
  CHECK(choose(CentralOrdered{false}, spec, e)[0].rule == RuleId::HC2);
  spec.priority_policy = PriorityPolicy::DaemonDecides;
  std::set<RuleId> seen;
  for (std::uint64_t s = 0; s < 64; ++s) seen.insert(choose(CentralRandom{s}, spec, e, s)[0].rule);
  CHECK(seen.size() == 2);
}

TEST_CASE("describe") {
  CHECK(describe(Synchronous{}) == "sync");
  CHECK(describe(CentralOrdered{true}) == "central-max");
  CHECK(describe(Scripted{}) == "scripted");
}
