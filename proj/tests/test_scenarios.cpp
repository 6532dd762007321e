#include <catch_amalgamated.hpp>

#include <map>

#include "oracles.hpp"

using namespace stabsim;

namespace {

// Step count of one phase from Conf_c_i(v, z) to Conf_c_i(z, z): two steps
// per increment of two at level i, each followed by a phase at level i-1.
std::uint64_t phase_steps(std::uint32_t i, std::uint32_t v, std::uint32_t z) {
  std::uint64_t total = 0;
  for (; v < z; v += 2) {
    total += 2;
    if (i >= 2) total += phase_steps(i - 1, v + 2, z);
  }
  return total;
}

std::uint64_t schedule_total(std::uint32_t k) {
  std::uint64_t t = 0;
  for (std::uint32_t j = 1; j <= k; ++j) t += phase_steps(j, 1, 2 * k + 3);
  return t;
}

}  // namespace

TEST_CASE("unbounded line: d grows past X before the tail repairs it") {
  for (std::uint32_t X : {5u, 6u, 10u, 17u}) {
    const auto s = scenario_unbounded_line(X);
    REQUIRE(s.script_length() == X + 1);
    const auto r = play_scenario(s);
    INFO(r.failure);
    REQUIRE(r.ok());
    CHECK(r.prefix_steps == X + 1);
    const auto after_x = r.trace.config_at(X);
    CHECK(std::max(after_x.d(2), after_x.d(3)) == X + 1);
    const auto after = r.trace.config_at(X + 1);
    CHECK(after.d(2) == X + 1);
    CHECK(after.d(3) == X + 1);
    CHECK(replay(r.trace, s.spec, s.graph).ok);
  }
  CHECK_THROWS_AS(scenario_unbounded_line(4), Error);
}

TEST_CASE("unbounded line with X = 10 (frozen values)") {
  const auto r = play_scenario(scenario_unbounded_line(10));
  REQUIRE(r.ok());
  const auto c10 = r.trace.config_at(10), c11 = r.trace.config_at(11);
  CHECK(std::pair(c10.d(2), c10.d(3)) == std::pair(10u, 11u));
  CHECK(std::pair(c11.d(2), c11.d(3)) == std::pair(11u, 11u));
  CHECK(r.trace.step_count == 15);
}

TEST_CASE("slow HC execution: k+1 rounds in 2k steps") {
  for (std::uint32_t k = 1; k <= 10; ++k) {
    const auto s = scenario_hc_slow(k);
    CHECK(s.spec == AlgorithmSpec::HC(2 * k));
    const auto r = play_scenario(s);
    INFO("k=" << k << " " << r.failure);
    REQUIRE(r.ok());
    CHECK(r.trace.step_count == 2 * k);
    CHECK(r.trace.round_count == k + 1);
    CHECK(r.trace.outcome == Outcome::Terminal);
    CHECK(replay(r.trace, s.spec, s.graph).ok);
  }
}

TEST_CASE("synchronous executions reach the round bounds") {
  for (std::uint32_t d = 2; d <= 8; ++d) {
    {
      const auto r = play_scenario(scenario_sync_u_line(d));
      INFO(r.failure);
      REQUIRE(r.ok());
      CHECK(r.trace.round_count == d);
    }
    for (std::uint32_t D : {d, d + 3}) {
      const auto r = play_scenario(scenario_sync_b_lollipop(d, D));
      INFO(r.failure);
      REQUIRE(r.ok());
      CHECK(r.trace.round_count == d);
    }
    {
      const auto r = play_scenario(scenario_sync_fhc_lollipop(d));
      INFO(r.failure);
      REQUIRE(r.ok());
      CHECK(r.trace.round_count == d + 1);
    }
  }
}

TEST_CASE("phase lengths follow the recursion") {
  for (std::uint32_t k = 1; k <= 4; ++k) {
    const std::uint32_t z = 2 * k + 3;
    for (std::uint32_t i = 1; i <= k; ++i)
      for (std::uint32_t v = 1; v <= z; v += 2) REQUIRE(measure_const(k, i, v, z) == phase_steps(i, v, z));
  }
  CHECK_THROWS_AS(measure_const(2, 1, 2, 7), Error);  // z - v odd
}

TEST_CASE("exponential executions") {
  // Step counts of the scripted prefix, frozen from the recursion above.
  const std::map<std::uint32_t, std::uint64_t> frozen{{1, 4},   {2, 18},  {3, 56},   {4, 150},
                                                      {5, 372}, {6, 882}, {7, 2032}, {8, 4590}};
  for (auto [k, steps] : frozen) {
    REQUIRE(schedule_total(k) == steps);
    CHECK(steps >= exponential_lower_bound(k));
    const auto plan = exponential_plan(k, 2 * k + 3);
    CHECK(plan.schedule.size() == steps);
    REQUIRE(plan.phase_steps.size() == k);
    for (std::uint32_t j = 1; j <= k; ++j) CHECK(plan.phase_steps[j - 1] == phase_steps(j, 1, 2 * k + 3));
  }
  for (std::uint32_t k = 1; k <= 5; ++k)
    for (Variant v : {Variant::HC, Variant::FHC, Variant::B}) {
      const auto s = scenario_exponential(k, std::nullopt, v);
      const auto r = play_scenario(s);
      INFO("k=" << k << " variant=" << to_string(v) << " " << r.failure);
      REQUIRE(r.ok());
      CHECK(r.prefix_steps == frozen.at(k));
      CHECK(replay(r.trace, s.spec, s.graph).ok);
    }
  CHECK(exponential_lower_bound(3) == 56);
  CHECK_THROWS_AS(exponential_plan(2, 6), Error);
}

TEST_CASE("a larger D does not change the exponential prefix") {
  const auto s = scenario_exponential(3, 12);
  const auto r = play_scenario(s);
  REQUIRE(r.ok());
  CHECK(r.prefix_steps == 56);
}

TEST_CASE("scenario lookup by name") {
  CHECK(scenario_by_name("hc-slow:k=3").spec == AlgorithmSpec::HC(6));
  CHECK(scenario_by_name("sync-b-lollipop:diam=4").spec == AlgorithmSpec::B(4));
  CHECK(scenario_by_name("sync-b-lollipop:diam=4,D=7").spec == AlgorithmSpec::B(7));
  CHECK(scenario_by_name("exponential:k=2,variant=FHC").spec.variant == Variant::FHC);
  CHECK(scenario_by_name("sync-u-line:diam=3,X=9").init.d(1) == 9);
  CHECK_THROWS_AS(scenario_by_name("nope:k=1"), Error);
  CHECK_THROWS_AS(scenario_by_name("hc-slow"), Error);
  CHECK_THROWS_AS(scenario_by_name("hc-slow:k=x"), Error);
  CHECK_THROWS_AS(scenario_by_name("hc-slow:k=2,j=1"), Error);
  CHECK_THROWS_AS(scenario_by_name("exponential:k=2,variant=U"), Error);
  CHECK(scenario_families().size() == 6);
}
