#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace stabsim;

namespace {

// Attractor membership written directly from the predicate definitions.
bool ref_att(const Graph& g, const Configuration& c, std::uint32_t i) {
  for (NodeId p = 1; p < g.node_count(); ++p) {
    if (g.distance(p) > i) continue;
    if (c.d(p) != g.distance(p) || c.d(p) != c.d(c.par(p)) + 1) return false;
  }
  return true;
}

bool ref_att_b(const Graph& g, const Configuration& c, std::uint32_t i) {
  if (!ref_att(g, c, i)) return false;
  for (NodeId p = 0; p < g.node_count(); ++p)
    if (g.distance(p) > i && c.d(p) <= i) return false;
  return true;
}

bool ref_att_hc(const Graph& g, const Configuration& c, std::uint32_t i) {
  for (NodeId p = 0; p < g.node_count(); ++p) {
    if (g.distance(p) <= i) {
      if (c.d(p) != g.distance(p)) return false;
      continue;
    }
    if (c.d(p) > i) continue;
    if (c.d(p) < i) return false;
    bool witness = false;
    for (NodeId q = 0; q < g.node_count(); ++q)
      if (g.adjacent(p, q) && c.d(q) <= i + 1) witness = true;
    if (!witness) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("legitimacy") {
  const auto g = build_lollipop(3);
  auto c = legitimate_configuration(g);
  CHECK(is_legitimate(g, c));
  c.set(4, 3, 2);  // the chord parent is also at distance 2
  CHECK(is_legitimate(g, c));
  c.set(4, 3, 3);  // p_3 is at distance 3
  CHECK_FALSE(is_legitimate(g, c));
}

TEST_CASE("tree verification reports each defect") {
  const auto g = build_lollipop(3);  // p_0 .. p_4, chord p_2 - p_4
  const auto legit = legitimate_configuration(g);
  CHECK(verify_bfs_tree(g, extract_tree(g, legit)).defect == TreeDefect::None);

  // p_4 hangs off p_3: spanning tree, but p_4 ends up at depth 4 instead of 3
  auto deep = legit;
  deep.set(4, 4, 3);
  CHECK(verify_bfs_tree(g, extract_tree(g, deep)).defect == TreeDefect::NotShortest);
  CHECK(to_string(TreeDefect::NotShortest) == "not-shortest");

  // p_3 and p_4 point at each other: one parent edge collapses
  auto pair = legit;
  pair.set(3, 1, 4);
  pair.set(4, 1, 3);
  CHECK(verify_bfs_tree(g, extract_tree(g, pair)).defect == TreeDefect::NotSpanning);

  CHECK(verify_bfs_tree(g, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {2, 4}}).defect == TreeDefect::Cycle);
  CHECK(verify_bfs_tree(g, {{0, 1}, {1, 2}, {2, 3}, {0, 4}}).defect == TreeDefect::NotSubgraph);
  CHECK(verify_bfs_tree(g, {{0, 1}, {1, 2}, {2, 3}}).defect == TreeDefect::NotSpanning);
}

TEST_CASE("attractor membership agrees with the reference predicates") {
  oracle::Gen gen(37);
  for (int t = 0; t < 500; ++t) {
    const auto g = gen.graph(gen.in(2, 9));
    const auto c = gen.config(g, g.diameter() + 2);
    for (std::uint32_t i = 0; i <= g.diameter(); ++i) {
      REQUIRE(in_att(g, c, i) == ref_att(g, c, i));
      REQUIRE(in_att_b(g, c, i) == ref_att_b(g, c, i));
      REQUIRE(in_att_hc(g, c, i) == ref_att_hc(g, c, i));
    }
  }
}

TEST_CASE("attractors are nested and the index is the largest member level") {
  oracle::Gen gen(41);
  for (int t = 0; t < 500; ++t) {
    const auto g = gen.graph(gen.in(2, 9));
    const auto c = gen.config(g, g.diameter() + 2);
    REQUIRE(in_att(g, c, 0));
    REQUIRE(in_att_b(g, c, 0));
    REQUIRE(in_att_hc(g, c, 0));
    for (std::uint32_t i = 0; i < g.diameter(); ++i) {
      if (in_att(g, c, i + 1)) REQUIRE(in_att(g, c, i));
      if (in_att_b(g, c, i + 1)) REQUIRE(in_att_b(g, c, i));
      if (in_att_hc(g, c, i + 1)) REQUIRE(in_att_hc(g, c, i));
      if (in_att_b(g, c, i)) REQUIRE(in_att(g, c, i));
    }
    const auto a = att_index(g, c), b = att_b_index(g, c), h = att_hc_index(g, c);
    REQUIRE(in_att(g, c, a));
    REQUIRE(in_att_b(g, c, b));
    REQUIRE(in_att_hc(g, c, h));
    for (auto i = a + 1; i <= g.diameter(); ++i) REQUIRE_FALSE(in_att(g, c, i));
    REQUIRE(b <= a);
  }
}

TEST_CASE("the legitimate configuration is in every attractor") {
  oracle::Gen gen(43);
  for (int t = 0; t < 100; ++t) {
    const auto g = gen.graph(gen.in(2, 10));
    const auto c = legitimate_configuration(g);
    CHECK(att_index(g, c) == g.diameter());
    CHECK(att_b_index(g, c) == g.diameter());
    CHECK(att_hc_index(g, c) == g.diameter());
  }
}

TEST_CASE("partition by distance value") {
  const auto g = build_line(3);
  Configuration c(4);
  c.set(1, 2, 0);
  c.set(2, 2, 1);
  c.set(3, 5, 2);
  const auto part = partition_by_distance_value(c);
  REQUIRE(part.size() == 3);
  CHECK(part.at(0) == std::vector<NodeId>{0});
  CHECK(part.at(2) == std::vector<NodeId>{1, 2});
  CHECK(part.at(5) == std::vector<NodeId>{3});
}

TEST_CASE("configuration classes on G_k") {
  using Id = GkIds;
  const auto g = build_gk(3);
  const std::uint32_t z = 9;

  SECTION("the Conf_c builder lands in class c") {
    for (std::uint32_t i = 1; i <= 3; ++i)
      for (std::uint32_t v = 1; v <= z; ++v) {
        const auto c = conf_c_configuration(g, i, v, z);
        REQUIRE(in_conf_class(g, c, ConfClass::C, i, v, z));
        if (v != z) REQUIRE_FALSE(in_conf_class(g, c, ConfClass::C, i, v + 1, z));
      }
  }
  SECTION("level one classes read e.1, f.1, f.0") {
    auto c = conf_c_configuration(g, 1, z, z);
    c.set(Id::f0(), 4, Id::e(1));
    CHECK(in_conf_class(g, c, ConfClass::B, 1, 4, z));
    CHECK_FALSE(in_conf_class(g, c, ConfClass::C, 1, 4, z));
    auto four = conf_c_configuration(g, 1, z, z);
    four.set(Id::f(1), 6, Id::e(1));
    CHECK(in_conf_class(g, four, ConfClass::Four, 1, 6, z));
    CHECK_FALSE(in_conf_class(g, four, ConfClass::B, 1, 6, z));
  }
  SECTION("the biconditionals and fixtures are enforced") {
    auto c = conf_c_configuration(g, 2, 3, z);
    REQUIRE(in_conf_class(g, c, ConfClass::C, 2, 3, z));
    auto wrong_par = c;
    wrong_par.set(Id::e(1), z, Id::f0());  // d = z but par is not g.1
    CHECK_FALSE(in_conf_class(g, wrong_par, ConfClass::C, 2, 3, z));
    auto fixture = c;
    fixture.set(Id::h(1), z - 2, Id::f(1));
    CHECK_FALSE(in_conf_class(g, fixture, ConfClass::C, 2, 3, z));
    auto root_side = c;
    root_side.set(Id::h0(), z, Id::f0());
    CHECK_FALSE(in_conf_class(g, root_side, ConfClass::C, 2, 3, z));
  }
  SECTION("parameter errors") {
    const auto c = conf_c_configuration(g, 1, 1, z);
    CHECK_THROWS_AS(in_conf_class(g, c, ConfClass::A, 1, 1, z), Error);
    CHECK_THROWS_AS(in_conf_class(g, c, ConfClass::C, 4, 1, z), Error);
    CHECK_THROWS_AS(in_conf_class(g, c, ConfClass::C, 1, 0, z), Error);
    CHECK_THROWS_AS(in_conf_class(g, c, ConfClass::C, 1, 1, 1), Error);
    CHECK_THROWS_AS(gk_order(build_line(3)), GraphError);
    CHECK(gk_order(g) == 3);
  }
}
