#include <random>

#include "doctest.h"
#include "featgts/error.hpp"
#include "featgts/sim.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace featgts;
using fixtures::agent;

TEST_SUITE("graph") {

TEST_CASE("attribute domains") {
  auto sym = AttrDomain::symbols({"S", "I", "R"});
  CHECK(sym.contains(Value{std::string("I")}));
  CHECK_FALSE(sym.contains(Value{std::string("X")}));
  CHECK_FALSE(sym.contains(Value{std::int64_t{1}}));
  CHECK(sym.values().size() == 3);

  auto ints = AttrDomain::int_range(-1, 2);
  CHECK(ints.values().size() == 4);
  CHECK(ints.contains(Value{std::int64_t{-1}}));
  CHECK_FALSE(ints.contains(Value{std::int64_t{3}}));
  CHECK(AttrDomain::int_range(3, 2).empty());

  auto grid = AttrDomain::grid(3);
  CHECK(grid.values().size() == 9);
  CHECK(grid.contains(Value{Cell{2, 2}}));
  CHECK_FALSE(grid.contains(Value{Cell{3, 0}}));
  CHECK(to_string(Value{Cell{1, 2}}) == "(1,2)");
}

TEST_CASE("type graph invariants") {
  CHECK_THROWS_AS(TypeGraph({"A", "A"}, {}, {}), Error);
  CHECK_THROWS_AS(TypeGraph({"A"}, {{"e", "A", "B"}}, {}), Error);
  CHECK_THROWS_AS(TypeGraph({"A"}, {}, {{"B", "x", AttrDomain::symbols({"u"})}}), Error);
  CHECK_THROWS_AS(TypeGraph({"A"}, {}, {{"A", "x", AttrDomain::symbols({})}}), Error);
  CHECK_NOTHROW(TypeGraph({"A"}, {{"e", "A", "A"}}, {{"A", "x", AttrDomain::int_range(0, 1)}}));

  const auto& sir = fixtures::basic().types;
  const auto& net = fixtures::network().types;
  CHECK(is_included(sir, net));
  CHECK_FALSE(is_included(net, sir));
  CHECK(*inclusion_failure(net, sir) == "edge type 'link' absent");
}

TEST_CASE("check_typing") {
  const auto& tg = fixtures::basic().types;
  CHECK(check_typing(InstanceGraph{}, tg).ok());

  InstanceGraph two;
  agent(two, "A1", "S");
  agent(two, "A2", "I");
  CHECK(check_typing(two, tg).ok());

  const auto& ntg = fixtures::network().types;
  InstanceGraph dangling = two;
  dangling.add_edge("x", "link", "A1", "A9");
  auto rep = check_typing(dangling, ntg);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0] == "edge 'x': dangling edge");

  InstanceGraph partial;
  partial.add_node("A", "Agent");
  CHECK(check_typing(partial, tg).violations == std::vector<std::string>{"node 'A': missing attribute 's'"});

  InstanceGraph outside;
  agent(outside, "A", "Q");
  CHECK_FALSE(check_typing(outside, tg).ok());

  InstanceGraph untyped_edge = two;
  untyped_edge.add_edge("x", "link", "A1", "A2");
  CHECK_FALSE(check_typing(untyped_edge, tg).ok());

  InstanceGraph parallel = two;
  parallel.add_edge("x", "link", "A1", "A2");
  parallel.add_edge("y", "link", "A1", "A2");
  CHECK(check_typing(parallel, ntg).ok());
}

TEST_CASE("restrict") {
  const auto& sir = fixtures::basic().types;
  const auto& net = fixtures::network().types;
  const auto& loc = fixtures::location().types;

  InstanceGraph g;
  agent(g, "A1", "S");
  agent(g, "A2", "I");
  InstanceGraph linked = g;
  linked.add_edge("x", "link", "A1", "A2");
  CHECK(restrict(linked, net, sir) == g);
  CHECK(restrict(linked, net, net) == linked);

  InstanceGraph located;
  agent(located, "A1", "S", 0, 0);
  agent(located, "A2", "I", 3, 4);
  CHECK(restrict(located, loc, sir) == g);

  CHECK_THROWS_AS(restrict(located, loc, net), Error);

  std::mt19937_64 rng(11);
  const auto& full = fixtures::full().types;
  for (int i = 0; i < 200; ++i) {
    auto h = oracle::random_graph(full, rng, 6, 6);
    for (const auto* sub : {&sir, &net, &loc, &full}) {
      auto once = restrict(h, full, *sub);
      CHECK(restrict(once, *sub, *sub) == once);
      CHECK(check_typing(once, *sub).ok());
    }
    CHECK(restrict(h, full, full) == h);
  }
}

TEST_CASE("find_morphisms examples") {
  InstanceGraph infected;
  agent(infected, "p", "I");
  InstanceGraph host;
  agent(host, "A1", "I");
  agent(host, "A2", "I");
  agent(host, "A3", "S");
  auto ms = find_morphisms(infected, host);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].node_map.at("p") == "A1");
  CHECK(ms[1].node_map.at("p") == "A2");

  auto empty = find_morphisms(InstanceGraph{}, host);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].node_map.empty());

  InstanceGraph linked;
  agent(linked, "p", "I");
  agent(linked, "q", "I");
  linked.add_edge("e", "link", "p", "q");
  CHECK(find_morphisms(linked, host).empty());
}

TEST_CASE("find_morphisms agrees with enumeration") {
  std::mt19937_64 rng(5);
  const auto tg = with_grid(fixtures::full(), 2).types;
  int total = 0;
  for (int i = 0; i < 300; ++i) {
    auto host = oracle::random_graph(tg, rng, 6, 6);
    auto pattern = oracle::random_graph(tg, rng, 3, 3);
    auto got = find_morphisms(pattern, host);
    CHECK(got == oracle::morphisms(pattern, host));
    for (const auto& m : got) CHECK(oracle::is_morphism(m, pattern, host));
    total += static_cast<int>(got.size());
  }
  CHECK(total > 0);
}

TEST_CASE("isomorphic") {
  InstanceGraph a;
  agent(a, "A1", "S");
  agent(a, "A2", "I");
  InstanceGraph b;
  agent(b, "B1", "I");
  agent(b, "B2", "S");
  CHECK(isomorphic(a, a));
  CHECK(isomorphic(a, b));

  InstanceGraph c;
  agent(c, "A1", "S");
  InstanceGraph d;
  agent(d, "A1", "S");
  agent(d, "A2", "S");
  CHECK_FALSE(isomorphic(c, d));

  InstanceGraph fwd = a;
  fwd.add_edge("x", "link", "A1", "A2");
  InstanceGraph rev = a;
  rev.add_edge("x", "link", "A2", "A1");
  CHECK_FALSE(isomorphic(fwd, rev));
}

TEST_CASE("isomorphic is an equivalence agreeing with enumeration") {
  std::mt19937_64 rng(17);
  const auto tg = with_grid(fixtures::full(), 2).types;
  std::vector<InstanceGraph> set;
  for (int i = 0; i < 40; ++i) set.push_back(oracle::random_graph(tg, rng, 3, 3));
  // Renamed copies guarantee some positive pairs.
  for (int i = 0; i < 10; ++i) {
    InstanceGraph copy;
    std::map<std::string, std::string> ren;
    for (const auto& [id, n] : set[i].nodes()) {
      ren[id] = "r" + id;
      copy.add_node("r" + id, n.type, n.attrs);
    }
    for (const auto& [id, e] : set[i].edges()) copy.add_edge("r" + id, e.type, ren[e.source], ren[e.target]);
    set.push_back(copy);
  }
  const std::size_t n = set.size();
  std::vector<std::vector<bool>> iso(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      iso[i][j] = isomorphic(set[i], set[j]);
      CHECK(iso[i][j] == oracle::isomorphic(set[i], set[j]));
    }
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(iso[i][i]);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(iso[i][j] == iso[j][i]);
      for (std::size_t k = 0; k < n; ++k)
        if (iso[i][j] && iso[j][k]) CHECK(iso[i][k]);
    }
  }
}

}  // TEST_SUITE
