#include <catch_amalgamated.hpp>

#include <map>

#include "oracles.hpp"

using namespace stabsim;

namespace {

std::set<RuleId> to_set(RuleSet r) {
  auto v = r.to_vector();
  return {v.begin(), v.end()};
}

std::vector<AlgorithmSpec> specs_for(std::uint32_t D) {
  auto drop = AlgorithmSpec::B(D);
  drop.mutation = Mutation::DropB3;
  return {AlgorithmSpec::U(), AlgorithmSpec::B(D), AlgorithmSpec::HC(D), AlgorithmSpec::FHC(D), drop};
}

}  // namespace

TEST_CASE("guards agree with the reference table on random configurations") {
  oracle::Gen gen(11);
  for (int t = 0; t < 400; ++t) {
    const auto g = gen.graph(gen.in(2, 9));
    const std::uint32_t D = g.diameter() + gen.in(0, 3);
    const auto c = gen.config(g, D);
    for (const auto& spec : specs_for(D))
      for (NodeId p = 0; p < g.node_count(); ++p)
        REQUIRE(to_set(enabled_rules(spec, g, c, p)) == oracle::enabled(spec, g, c, p));
  }
}

TEST_CASE("rule effects") {
  // p_0 - p_1 - p_2 - p_3, with p_3 also adjacent to p_1
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {1, 3}};
  const auto g = Graph::from_edges(4, e);
  Configuration c(4);
  c.set(1, 1, 0);
  c.set(2, 3, 3);
  c.set(3, 4, 2);

  SECTION("U1 recomputes d and picks the smallest-id minimum neighbor") {
    const auto next = apply_rule(AlgorithmSpec::U(), g, c, 2, RuleId::U1);
    CHECK(next[2] == ProcessState{2, 1});
    CHECK(next[3] == c[3]);
  }
  SECTION("HC1 copies the parent value plus one") {
    CHECK_FALSE(enabled_rules(AlgorithmSpec::HC(5), g, c, 3).contains(RuleId::HC1));
    const auto next = apply_rule(AlgorithmSpec::HC(5), g, c, 2, RuleId::HC1);
    CHECK(next[2] == ProcessState{5, 3});
  }
  SECTION("HC1 is disabled once the parent reaches D") {
    CHECK_FALSE(enabled_rules(AlgorithmSpec::HC(4), g, c, 2).contains(RuleId::HC1));
    CHECK_THROWS_AS(apply_rule(AlgorithmSpec::HC(4), g, c, 2, RuleId::HC1), RuleNotEnabled);
  }
  SECTION("B3 saturates at D") {
    Configuration s(4);
    s.set(1, 2, 3);
    s.set(2, 2, 1);
    s.set(3, 2, 1);
    const auto spec = AlgorithmSpec::B(2);
    CHECK(enabled_rules(spec, g, s, 2) == RuleSet{});
    s.set(2, 1, 1);
    CHECK(enabled_rules(spec, g, s, 2) == RuleSet{RuleId::B3});
    CHECK(apply_rule(spec, g, s, 2, RuleId::B3)[2] == ProcessState{2, 1});
  }
  SECTION("tie policies") {
    Configuration u(4);
    u.set(1, 1, 0);
    u.set(2, 1, 1);
    u.set(3, 5, 2);
    CHECK(best_parent(g, u, 3, TiePolicy::SmallestId) == 1);
    CHECK(best_parent(g, u, 3, TiePolicy::KeepCurrent) == 2);
  }
  SECTION("root never moves and foreign rules are refused") {
    CHECK(enabled_rules(AlgorithmSpec::U(), g, c, 0).empty());
    CHECK_THROWS_AS(apply_rule(AlgorithmSpec::U(), g, c, 0, RuleId::U1), RuleNotEnabled);
    CHECK_THROWS_AS(apply_rule(AlgorithmSpec::HC(5), g, c, 2, RuleId::U1), RuleNotEnabled);
  }
}

TEST_CASE("FHC guards are mutually exclusive") {
  oracle::Gen gen(13);
  for (int t = 0; t < 300; ++t) {
    const auto g = gen.graph(gen.in(2, 8));
    const std::uint32_t D = g.diameter() + gen.in(0, 2);
    const auto c = gen.config(g, D);
    for (NodeId p = 1; p < g.node_count(); ++p)
      REQUIRE(enabled_rules(AlgorithmSpec::FHC(D), g, c, p).size() <= 1);
  }
}

TEST_CASE("bounded variants stay inside [1..D]") {
  oracle::Gen gen(17);
  for (int t = 0; t < 300; ++t) {
    const auto g = gen.graph(gen.in(2, 8));
    const std::uint32_t D = g.diameter() + gen.in(0, 2);
    const auto c = gen.config(g, D);
    for (const auto& spec : {AlgorithmSpec::B(D), AlgorithmSpec::HC(D), AlgorithmSpec::FHC(D)})
      for (NodeId p = 1; p < g.node_count(); ++p)
        for (RuleId r : enabled_rules(spec, g, c, p).to_vector()) {
          const auto s = rule_effect(spec, g, c, p, r);
          REQUIRE(s.d >= 1);
          REQUIRE(s.d <= D);
          REQUIRE(g.adjacent(p, s.par));
        }
  }
}

TEST_CASE("the legitimate configuration is terminal for every variant when D >= diameter") {
  oracle::Gen gen(19);
  for (int t = 0; t < 200; ++t) {
    const auto g = gen.graph(gen.in(2, 10));
    const auto c = legitimate_configuration(g);
    REQUIRE(check_configuration(AlgorithmSpec::U(), g, c).empty());
    for (const auto& spec : specs_for(g.diameter() + gen.in(0, 3))) REQUIRE(is_terminal(spec, g, c));
  }
}

TEST_CASE("check_configuration") {
  const auto g = build_line(3);
  auto c = legitimate_configuration(g);
  CHECK(check_configuration(AlgorithmSpec::B(3), g, c).empty());
  CHECK_FALSE(check_configuration(AlgorithmSpec::B(2), g, c).empty());
  CHECK(check_configuration(AlgorithmSpec::U(), g, c).empty());
  auto bad = c;
  bad.set(2, 2, 0);
  CHECK_FALSE(check_configuration(AlgorithmSpec::U(), g, bad).empty());
  bad = c;
  bad.set(1, 0, 0);
  CHECK_FALSE(check_configuration(AlgorithmSpec::U(), g, bad).empty());
  CHECK_FALSE(check_configuration(AlgorithmSpec::U(), g, Configuration(2)).empty());
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(AlgorithmSpec::B(0).validate(), Error);
  CHECK_THROWS_AS(AlgorithmSpec::HC(0).validate(), Error);
  CHECK_NOTHROW(AlgorithmSpec::U().validate());
  auto m = AlgorithmSpec::HC(3);
  m.mutation = Mutation::DropB3;
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK(parse_variant("FHC") == Variant::FHC);
  CHECK_FALSE(parse_variant("X").has_value());
}

TEST_CASE("random configurations are valid, seed-stable and uniform over par") {
  const auto g = build_gk(2);
  const auto spec = AlgorithmSpec::HC(7);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto c = random_configuration(spec, g, s);
    REQUIRE(check_configuration(spec, g, c).empty());
    REQUIRE(c == random_configuration(spec, g, s));
  }
  // e.1 has three neighbors; chi-square over 3000 draws, 2 dof, p = 0.001 cut-off 13.8
  std::map<NodeId, int> count;
  std::map<std::uint32_t, int> dcount;
  const int N = 3000;
  for (int s = 0; s < N; ++s) {
    const auto c = random_configuration(spec, g, static_cast<std::uint64_t>(s));
    ++count[c.par(GkIds::e(1))];
    ++dcount[c.d(GkIds::e(1))];
  }
  REQUIRE(count.size() == 3);
  double chi = 0;
  for (auto [q, k] : count) chi += (k - N / 3.0) * (k - N / 3.0) / (N / 3.0);
  CHECK(chi < 13.8);
  REQUIRE(dcount.size() == 7);
  double chi_d = 0;
  for (auto [d, k] : dcount) chi_d += (k - N / 7.0) * (k - N / 7.0) / (N / 7.0);
  CHECK(chi_d < 22.5);  // 6 dof, p = 0.001
  CHECK_THROWS_AS(random_configuration(AlgorithmSpec::U(), g, 1, 0), Error);
}

TEST_CASE("every HC2 move has a B1 or B2 counterpart with the same effect") {
  // Brute force over every configuration of two small graphs: whenever HC2 is
  // enabled at p, B1 or B2 is enabled at p and yields the same state.
  for (const auto& g : {build_line(3), build_lollipop(3)}) {
    const std::uint32_t D = g.diameter() + 1;
    const auto n = g.node_count();
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
      Configuration c(n);
      for (NodeId p = 1; p < n; ++p) {
        const auto nb = g.neighbors(p);
        c.set(p, 1 + static_cast<std::uint32_t>(idx[p] % D), nb[idx[p] / D]);
      }
      for (NodeId p = 1; p < n; ++p) {
        if (!enabled_rules(AlgorithmSpec::HC(D), g, c, p).contains(RuleId::HC2)) continue;
        const auto b = enabled_rules(AlgorithmSpec::B(D), g, c, p);
        REQUIRE((b.contains(RuleId::B1) || b.contains(RuleId::B2)));
        const auto hc = rule_effect(AlgorithmSpec::HC(D), g, c, p, RuleId::HC2);
        const auto rule = b.contains(RuleId::B1) ? RuleId::B1 : RuleId::B2;
        REQUIRE(rule_effect(AlgorithmSpec::B(D), g, c, p, rule) == hc);
      }
      NodeId p = 1;
      while (p < n && ++idx[p] == D * g.degree(p)) idx[p++] = 0;
      if (p == n) break;
    }
  }
}
