#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace stabsim;

TEST_CASE("G_k size and diameter for k up to 10") {
  for (std::uint32_t k = 1; k <= 10; ++k) {
    const auto g = build_gk(k);
    REQUIRE(g.node_count() == 4 * k + 3);
    REQUIRE(g.diameter() == 2 * k + 3);
    REQUIRE(oracle::floyd_diameter(g.node_count(), g.edges()) == 2 * k + 3);
  }
}

TEST_CASE("every non-root node has a neighbor one hop closer to the root") {
  oracle::Gen gen(53);
  for (int t = 0; t < 300; ++t) {
    const auto g = gen.graph(gen.in(2, 14), 0.15);
    for (NodeId p = 1; p < g.node_count(); ++p) {
      std::uint32_t m = oracle::kInf;
      for (NodeId q : g.neighbors(p)) m = std::min(m, g.distance(q));
      REQUIRE(m + 1 == g.distance(p));
    }
  }
}

TEST_CASE("adjacency is symmetric and parse after serialize is the identity") {
  oracle::Gen gen(59);
  for (int t = 0; t < 200; ++t) {
    const auto g = gen.graph(gen.in(2, 12));
    for (NodeId u = 0; u < g.node_count(); ++u)
      for (NodeId v : g.neighbors(u)) REQUIRE(g.adjacent(v, u));
    REQUIRE(parse_graph(serialize_graph(g)) == g);
  }
}

TEST_CASE("a rule application changes exactly the moving process") {
  oracle::Gen gen(61);
  for (int t = 0; t < 300; ++t) {
    const auto g = gen.graph(gen.in(2, 8));
    const std::uint32_t D = g.diameter() + gen.in(0, 2);
    const auto c = gen.config(g, D);
    for (const auto& spec : {AlgorithmSpec::U(), AlgorithmSpec::B(D), AlgorithmSpec::HC(D), AlgorithmSpec::FHC(D)})
      for (NodeId p = 1; p < g.node_count(); ++p)
        for (RuleId r : enabled_rules(spec, g, c, p).to_vector()) {
          const auto next = apply_rule(spec, g, c, p, r);
          for (NodeId q = 0; q < g.node_count(); ++q) REQUIRE((next[q] == c[q]) == (q != p));
        }
  }
}

TEST_CASE("daemons only return enabled moves") {
  oracle::Gen gen(67);
  for (int t = 0; t < 300; ++t) {
    const auto g = gen.graph(gen.in(2, 8));
    const std::uint32_t D = g.diameter() + 1;
    const auto c = gen.config(g, D);
    const std::uint64_t seed = gen.in(0, 1000);
    for (const auto& spec : {AlgorithmSpec::U(), AlgorithmSpec::B(D), AlgorithmSpec::HC(D), AlgorithmSpec::FHC(D)}) {
      const auto e = compute_enabled(spec, g, c);
      if (enabled_processes(e).empty()) continue;
      for (const DaemonStrategy& d :
           {DaemonStrategy{Synchronous{}}, DaemonStrategy{CentralRandom{seed}}, DaemonStrategy{DistributedRandom{seed, 0.5}},
            DaemonStrategy{Priority{DistributedRandom{seed, 0.5}, RulePreference::Random}}}) {
        const auto moves = choose(d, spec, e, static_cast<std::size_t>(t));
        REQUIRE(check_moves(e, moves).empty());
        for (auto m : moves) REQUIRE(oracle::enabled(spec, g, c, m.process).count(m.rule) == 1);
      }
    }
  }
}

TEST_CASE("legitimate configurations are terminal for U on random graphs") {
  oracle::Gen gen(71);
  for (int t = 0; t < 200; ++t) {
    const auto g = gen.graph(gen.in(2, 12));
    REQUIRE(is_terminal(AlgorithmSpec::U(), g, legitimate_configuration(g)));
  }
}

TEST_CASE("terminal is legitimate on every enumerable instance with n <= 3") {
  for (std::size_t n = 2; n <= 3; ++n)
    for (const auto& g : all_connected_graphs(n))
      for (std::uint32_t D = g.diameter(); D <= g.diameter() + 2; ++D)
        for (const auto& spec : {AlgorithmSpec::B(D), AlgorithmSpec::HC(D), AlgorithmSpec::FHC(D)}) {
          const StateSpace sp(spec, g);
          for (std::uint64_t i = 0; i < sp.size(); ++i) {
            const auto c = sp.decode(i);
            REQUIRE(is_terminal(spec, g, c) == is_legitimate(g, c));
            if (is_legitimate(g, c)) REQUIRE(verify_bfs_tree(g, extract_tree(g, c)).defect == TreeDefect::None);
          }
        }
}

TEST_CASE("attractor indexes never decrease along executions and reach min(r, diameter) after r rounds") {
  oracle::Gen gen(73);
  for (int t = 0; t < 300; ++t) {
    const auto g = gen.graph(gen.in(2, 8));
    const std::uint32_t diam = g.diameter();
    const std::uint32_t D = diam + gen.in(0, 2);
    const std::uint64_t seed = gen.in(0, 1u << 20);
    for (const auto& spec : {AlgorithmSpec::U(), AlgorithmSpec::B(D), AlgorithmSpec::FHC(D)}) {
      const bool hc = spec.variant == Variant::FHC;
      auto index = [&](const Configuration& c) { return hc ? att_hc_index(g, c) : att_b_index(g, c); };
      const auto init = spec.bounded() ? gen.config(g, D) : gen.config(g, 3 * diam);
      std::uint32_t last = index(init);
      RunOptions o;
      o.on_step = [&](const StepEvent& e) {
        const auto now = index(e.config);
        REQUIRE(now >= last);
        last = now;
        if (e.round_closed) REQUIRE(now >= std::min<std::size_t>(e.round_count, diam));
      };
      const DaemonStrategy d = t % 2 ? DaemonStrategy{DistributedRandom{seed, 0.5}} : DaemonStrategy{CentralRandom{seed}};
      const auto tr = run(spec, g, init, d, o);
      REQUIRE(tr.outcome == Outcome::Terminal);
      REQUIRE(is_legitimate(g, tr.final_config));
      REQUIRE(tr.round_count <= diam + (hc ? 1 : 0));
    }
  }
}

TEST_CASE("HC executions terminate legitimately under random daemons") {
  oracle::Gen gen(79);
  for (int t = 0; t < 300; ++t) {
    const auto g = gen.graph(gen.in(2, 8));
    const std::uint32_t D = g.diameter() + gen.in(0, 2);
    auto spec = AlgorithmSpec::HC(D);
    spec.priority_policy = t % 3 == 0 ? PriorityPolicy::HC1First
                         : t % 3 == 1 ? PriorityPolicy::HC2First
                                      : PriorityPolicy::DaemonDecides;
    const auto tr = run(spec, g, gen.config(g, D), DistributedRandom{static_cast<std::uint64_t>(t), 0.5});
    REQUIRE(tr.outcome == Outcome::Terminal);
    REQUIRE(is_legitimate(g, tr.final_config));
    REQUIRE(replay(tr, spec, g).ok);
  }
}

TEST_CASE("exponential prefix lengths grow with k") {
  std::size_t prev = 0;
  for (std::uint32_t k = 1; k <= 7; ++k) {
    const auto n = exponential_plan(k, 2 * k + 3).schedule.size();
    REQUIRE(n > prev);
    REQUIRE(n >= exponential_lower_bound(k));
    prev = n;
  }
}
