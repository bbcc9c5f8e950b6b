#include <doctest.h>

#include <random>

#include "mcsynth/error.hpp"
#include "mcsynth/generator.hpp"
#include "mcsynth/validator.hpp"
#include "support.hpp"

using namespace mcsynth;
using testsupport::worked_example_oracle;
using testsupport::sorted_edges;

TEST_CASE("connection quota") {
  CHECK(connection_quota(5, 2) == ConnectionQuota{2, 1, 5});
  CHECK(connection_quota(17, 4) == ConnectionQuota{4, 1, 17});
  CHECK(connection_quota(3, 3) == ConnectionQuota{1, 0, 3});
  CHECK_THROWS_AS(connection_quota(2, 3), Error);
  CHECK_THROWS_AS(connection_quota(0, 0), Error);
  for (int nc = 1; nc <= 60; ++nc) {
    for (int mc = 1; mc <= nc; ++mc) {
      const auto q = connection_quota(nc, mc);
      CHECK(q.total == nc);
      CHECK(q.remainder < mc);
    }
  }
}

TEST_CASE("assign_level spreads children round robin") {
  std::vector<ComponentId> kids{{0}, {1}, {2}, {3}, {4}};
  std::vector<ComponentId> parents{{10}, {11}};
  const auto edges = assign_level(kids, parents, Stream::Instruction);
  REQUIRE(edges.size() == 5);
  const std::uint32_t want[] = {10, 11, 10, 11, 10};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(edges[i].lower == kids[i]);
    CHECK(edges[i].upper.value == want[i]);
    CHECK(edges[i].stream == Stream::Instruction);
  }
  CHECK_THROWS_AS(assign_level({}, parents, Stream::Data), Error);
  CHECK_THROWS_AS(assign_level(std::vector<ComponentId>{{0}}, parents, Stream::Data), Error);
}

TEST_CASE("worked example matches the hand-built wiring") {
  const auto g = generate(parse_topology("5C_5DL1_2IL1_2DL2_BP"));
  const auto oracle = worked_example_oracle();
  CHECK(g.kind == TopologyKind::Bypass2);
  CHECK(g.components == oracle.components);
  CHECK(sorted_edges(g) == sorted_edges(oracle));
  CHECK(g.connections.size() == 22);
  CHECK(validate_graph(oracle, oracle.spec).ok);
}

TEST_CASE("bypass network requires a bypass graph") {
  CHECK_THROWS_AS(build_bypass_network(build_core_graph(parse_topology("2C_2L1_1L2"))), Error);
}

TEST_CASE("three-level bypass sends IL2 to memory through switches") {
  const auto g = generate(parse_topology("4C_4DL1_2IL1_2DL2_2IL2_1L3_BP"));
  const auto mem = *g.memory();
  for (auto il2 : g.caches(2, CacheRole::Instruction)) {
    auto cur = il2;
    int hops = 0;
    while (true) {
      const auto it = std::find_if(g.connections.begin(), g.connections.end(),
                                   [&](const Connection& e) { return e.lower == cur; });
      REQUIRE(it != g.connections.end());
      cur = it->upper;
      if (g.at(cur).kind != ComponentKind::Switch) break;
      ++hops;
    }
    CHECK(cur == mem);
    CHECK(hops >= 1);
  }
}

TEST_CASE("two-level bypass with L3 attaches switch trees to each L3") {
  const auto g = generate(parse_topology("24C_24DL1_12IL1_6DL2_2L3_BP"));
  const auto l3s = g.caches(3, CacheRole::Unified);
  REQUIRE(l3s.size() == 2);
  for (auto l3 : l3s) {
    int switch_inputs = 0;
    for (const auto& e : g.connections) {
      if (e.upper == l3 && g.at(e.lower).kind == ComponentKind::Switch) ++switch_inputs;
    }
    CHECK(switch_inputs == 1);
  }
  // Per L3: 6 IL1 -> 3 + 1 switches, 3 DL2 -> 1 switch, plus the root.
  CHECK(g.of_kind(ComponentKind::Switch).size() == 2 * (4 + 1 + 1));
}

TEST_CASE("switch count formula") {
  CHECK(family_switch_count(1) == 0);
  CHECK(family_switch_count(2) == 1);
  CHECK(family_switch_count(3) == 1);
  CHECK(family_switch_count(5) == 3);
  CHECK(family_switch_count(17) == 8 + 4 + 2 + 1);
}

TEST_CASE("generated graphs have dense ids and deterministic output") {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto s = testsupport::random_spec(rng);
    const auto a = generate(s);
    const auto b = generate(s);
    CHECK(a == b);
    for (std::size_t k = 0; k < a.components.size(); ++k) CHECK(a.components[k].id.value == k);
    CHECK(parse_edges(dump_edges(a)) == a);
  }
}
