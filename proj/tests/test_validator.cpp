#include <doctest.h>

#include <random>

#include "mcsynth/generator.hpp"
#include "mcsynth/validator.hpp"
#include "support.hpp"

using namespace mcsynth;

namespace {

bool has_code(const ValidationReport& r, std::string_view code) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("closure: every generated graph validates") {
  std::mt19937 rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto s = testsupport::random_spec(rng);
    const auto g = generate(s);
    const auto r = validate_graph(g, s);
    CAPTURE(canonical_name(s));
    CHECK_MESSAGE(r.ok, r.summary());
    CHECK(testsupport::bf::valid(g, s));
  }
}

TEST_CASE("every single-edge mutation of the worked example is flagged") {
  const auto base = testsupport::worked_example_oracle();
  const auto mutants = testsupport::single_edge_mutations(base);
  CHECK(mutants.size() > 22 * 18);
  int missed = 0;
  for (const auto& m : mutants) {
    if (validate_graph(m, m.spec).ok) ++missed;
    CHECK(validate_graph(m, m.spec).ok == testsupport::bf::valid(m, m.spec));
  }
  CHECK(missed == 0);
}

TEST_CASE("specific defects carry their violation code") {
  const auto base = testsupport::worked_example_oracle();
  SUBCASE("back edge is a cycle") {
    auto g = base;
    g.connections.push_back({ComponentId{12}, ComponentId{5}, Stream::Data});
    const auto r = validate_graph(g, g.spec);
    CHECK(has_code(r, "cycle"));
    CHECK(has_code(r, "layering"));
  }
  SUBCASE("missing switch is a cardinality violation") {
    auto g = base;
    g.components.pop_back();
    std::erase_if(g.connections, [](const Connection& e) { return e.lower.value == 17 || e.upper.value == 17; });
    CHECK(has_code(validate_cardinality(g, g.spec), "cardinality"));
  }
  SUBCASE("skewed fan-in") {
    auto g = base;
    g.connections[6].upper = ComponentId{10};  // C2 -> IL1#1
    CHECK(has_code(validate_connectivity(g, g.spec), "fan-in"));
  }
  SUBCASE("wrong stream") {
    auto g = base;
    g.connections[0].stream = Stream::Both;
    CHECK(has_code(validate_connectivity(g, g.spec), "stream"));
  }
  SUBCASE("isolated cache cannot reach memory") {
    auto g = base;
    std::erase_if(g.connections, [](const Connection& e) { return e.lower.value == 13; });
    CHECK(has_code(validate_graph(g, g.spec), "reachability"));
  }
  SUBCASE("graph checked against a different spec") {
    CHECK_FALSE(validate_graph(base, parse_topology("5C_5DL1_2IL1_1DL2_BP")).ok);
  }
}

TEST_CASE("validator and brute-force oracle agree on random mutants") {
  std::mt19937 rng(19);
  int flagged = 0, total = 0;
  for (int i = 0; i < 120; ++i) {
    const auto s = testsupport::random_spec(rng, 16);
    const auto g = generate(s);
    for (int k = 0; k < 10; ++k) {
      const auto m = testsupport::random_mutation(g, rng);
      const bool ours = validate_graph(m, s).ok;
      CAPTURE(canonical_name(s));
      CHECK(ours == testsupport::bf::valid(m, s));
      flagged += ours ? 0 : 1;
      ++total;
    }
  }
  CHECK(flagged > total / 2);
}
