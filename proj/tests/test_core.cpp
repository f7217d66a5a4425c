#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "trajfid/core.hpp"
#include "trajfid/error.hpp"

using namespace trajfid;
using trajfid::testing::tr;

TEST_CASE("agent ids accept only the token alphabet") {
  CHECK_NOTHROW(AgentId("Pay_Sup-2"));
  CHECK_THROWS_AS(AgentId(""), ValidationError);
  CHECK_THROWS_AS(AgentId("Pay Sup"), ValidationError);
  CHECK_THROWS_AS(AgentId("a,b"), ValidationError);
  CHECK_THROWS_AS(AgentId("\"q\""), ValidationError);
  CHECK_FALSE(AgentId::is_valid("caf\xc3\xa9"));
}

TEST_CASE("trajectories are non-empty") {
  CHECK_THROWS_AS(Trajectory(std::vector<AgentId>{}), ValidationError);
  Trajectory t{"A", "B", "A"};
  CHECK(t.size() == 3);
  CHECK(to_string(t) == "A -> B -> A");
}

TEST_CASE("transitions of a trajectory") {
  SUBCASE("three agents") {
    const auto m = transitions(Trajectory{"A", "B", "C"});
    CHECK(m == TransitionMultiset{{tr("A", "B"), 1}, {tr("B", "C"), 1}});
  }
  SUBCASE("single agent gives the empty multiset") {
    const auto m = transitions(Trajectory{"A"});
    CHECK(m.empty());
    CHECK(total_size(m) == 0);
  }
  SUBCASE("repeated hops are counted") {
    const auto m = transitions(Trajectory{"A", "B", "A", "B"});
    CHECK(m == TransitionMultiset{{tr("A", "B"), 2}, {tr("B", "A"), 1}});
  }
  SUBCASE("default payment workflow has ten transitions") {
    CHECK(total_size(transitions(trajfid::testing::t3_expected())) == 10);
  }
}

TEST_CASE("zero counts are never stored") {
  TransitionMultiset m;
  m.add(tr("A", "B"), 0);
  CHECK(m.empty());
  CHECK(m == TransitionMultiset{});
}

TEST_CASE("intersect") {
  CHECK(intersect({{tr("A", "B"), 2}}, {{tr("A", "B"), 1}}) == TransitionMultiset{{tr("A", "B"), 1}});
  CHECK(intersect({{tr("A", "B"), 1}}, {{tr("B", "A"), 1}}).empty());
  const TransitionMultiset x{{tr("A", "B"), 3}, {tr("C", "D"), 1}};
  CHECK(intersect(x, x) == x);
}

TEST_CASE("subtract") {
  const TransitionMultiset a{{tr("A", "B"), 2}, {tr("C", "D"), 1}};
  CHECK(subtract(a, {{tr("A", "B"), 1}}) == TransitionMultiset{{tr("A", "B"), 1}, {tr("C", "D"), 1}});
  CHECK(subtract(a, a).empty());
  CHECK(subtract({}, a).empty());
}

TEST_CASE("total size") {
  CHECK(total_size({{tr("A", "B"), 2}, {tr("B", "A"), 1}}) == 3);
  CHECK(total_size({}) == 0);
}

TEST_CASE("multiset algebra properties on random trajectories") {
  std::mt19937_64 gen(20260417);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto ta = trajfid::testing::random_trajectory(gen, 4, 1, 9);
    const auto tb = trajfid::testing::random_trajectory(gen, 4, 1, 9);
    const auto tc = trajfid::testing::random_trajectory(gen, 4, 1, 9);
    const auto a = transitions(ta);
    const auto b = transitions(tb);
    const auto c = transitions(tc);

    REQUIRE(total_size(a) == ta.size() - 1);
    CHECK(total_size(intersect(a, b)) <= std::min(total_size(a), total_size(b)));
    CHECK(intersect(a, b) == intersect(b, a));
    CHECK(intersect(intersect(a, b), c) == intersect(a, intersect(b, c)));

    // intersect and subtract partition a, per transition.
    const auto i = intersect(a, b);
    const auto s = subtract(a, b);
    for (const auto& [t, n] : a) CHECK(n == i.count(t) + s.count(t));
    CHECK(total_size(i) + total_size(s) == total_size(a));
    for (const auto& [t, n] : i) CHECK(n >= 1);
    for (const auto& [t, n] : s) CHECK(n >= 1);
  }
}

TEST_CASE("rotations of a cycle share a multiset but not a sequence") {
  const Trajectory a{"A", "B", "C", "A"};
  const Trajectory b{"B", "C", "A", "B"};
  CHECK(a != b);
  CHECK(transitions(a) == transitions(b));
}
