#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "trajfid/diagnostics.hpp"
#include "trajfid/error.hpp"
#include "trajfid/metrics.hpp"

using namespace trajfid;
using trajfid::testing::t3_expected;
using trajfid::testing::t3_shortcut;
using trajfid::testing::tr;

namespace {

RunRecord run(std::string id, std::string model, std::string scenario, Trajectory t) {
  return RunRecord{.run_id = std::move(id), .model = std::move(model),
                   .scenario = std::move(scenario), .repeat = 0, .trajectory = std::move(t),
                   .success = true, .meta = std::nullopt};
}

}  // namespace

TEST_CASE("deviations of the confirmation shortcut") {
  // Expected T3 transitions, enumerated by hand:
  //   (CPA,PaySup) x2, (PaySup,CartAg), (CartAg,PaySup), (PaySup,CPA) x2,
  //   (PaySup,ReviewAg), (ReviewAg,PaySup), (PaySup,ExecAg), (ExecAg,PaySup)
  // Shortcut keeps one of each doubled pair and everything else.
  const auto d = deviations(t3_expected(), t3_shortcut());
  CHECK(d.missing == TransitionMultiset{{tr("PaySup", "CPA"), 1}, {tr("CPA", "PaySup"), 1}});
  CHECK(d.surplus.empty());
  CHECK_FALSE(d.conforming());
}

TEST_CASE("deviations of identical trajectories") {
  const auto d = deviations(t3_expected(), t3_expected());
  CHECK(d.conforming());
}

TEST_CASE("an inserted round trip is all surplus") {
  const Trajectory e{"A", "B", "C"};
  const Trajectory o{"A", "B", "A", "B", "C"};
  const auto d = deviations(e, o);
  CHECK(d.missing.empty());
  CHECK(d.surplus == TransitionMultiset{{tr("A", "B"), 1}, {tr("B", "A"), 1}});
}

TEST_CASE("diagnostics agree with metrics") {
  std::mt19937_64 gen(31);
  for (int i = 0; i < 2000; ++i) {
    const auto e = trajfid::testing::random_trajectory(gen, 4, 2, 8);
    const auto o = trajfid::testing::random_trajectory(gen, 4, 2, 8);
    const auto be = transitions(e);
    const auto bo = transitions(o);
    const auto d = deviations(e, o);
    const auto common = total_size(intersect(be, bo));
    CHECK(total_size(d.missing) == total_size(be) - common);
    CHECK(total_size(d.surplus) == total_size(bo) - common);
    CHECK(intersect(d.missing, d.surplus).empty());
    CHECK(transition_recall(be, bo) ==
          doctest::Approx(1.0 - static_cast<double>(total_size(d.missing)) /
                                    static_cast<double>(total_size(be))));
    CHECK(transition_precision(be, bo) ==
          doctest::Approx(1.0 - static_cast<double>(total_size(d.surplus)) /
                                    static_cast<double>(total_size(bo))));
    CHECK(d.conforming() == (be == bo));
  }
}

TEST_CASE("cluster_patterns") {
  const auto& spec = default_workflow();

  SUBCASE("a single shared shortcut is one cluster") {
    std::vector<RunRecord> rs;
    for (int i = 0; i < 6; ++i) {
      rs.push_back(run("r" + std::to_string(i), i % 2 ? "a" : "b", "T3",
                       i % 3 == 0 ? t3_expected() : t3_shortcut()));
    }
    const auto cs = cluster_patterns(rs, spec);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].count == 4);
    CHECK(cs[0].trajectory == t3_shortcut());
    CHECK(cs[0].models == std::set<std::string>{"a", "b"});
    CHECK(cs[0].scenarios == std::set<std::string>{"T3"});
    CHECK_FALSE(cs[0].order_only);
  }
  SUBCASE("no deviant runs") {
    std::vector<RunRecord> rs{run("r", "m", "T4", Trajectory{"CPA"})};
    CHECK(cluster_patterns(rs, spec).empty());
  }
  SUBCASE("sorted by count, ties by first occurrence") {
    std::vector<RunRecord> rs;
    const Trajectory x{"CPA", "PaySup", "CPA"};
    const Trajectory y{"CPA", "CardSup", "CPA"};
    const Trajectory z{"CPA", "ExecAg"};
    int n = 0;
    rs.push_back(run("r" + std::to_string(n++), "m", "T3", z));
    for (int i = 0; i < 3; ++i) rs.push_back(run("r" + std::to_string(n++), "m", "T3", x));
    for (int i = 0; i < 7; ++i) rs.push_back(run("r" + std::to_string(n++), "m", "T3", y));
    rs.push_back(run("r" + std::to_string(n++), "m", "T1", Trajectory{"CPA", "Extra"}));
    const auto cs = cluster_patterns(rs, spec);
    REQUIRE(cs.size() == 4);
    CHECK(cs[0].count == 7);
    CHECK(cs[1].count == 3);
    CHECK(cs[2].trajectory == z);  // first seen among the count-1 clusters
    CHECK(cs[3].trajectory == Trajectory{"CPA", "Extra"});
    std::size_t total = 0;
    for (const auto& c : cs) total += c.count;
    CHECK(total == rs.size());
  }
  SUBCASE("rotated cycle is flagged order-only") {
    WorkflowSpec cyc;
    cyc.agents = {AgentId("A"), AgentId("B"), AgentId("C")};
    cyc.scenarios.push_back(Scenario{"S", Trajectory{"A", "B", "C", "A"}, ""});
    std::vector<RunRecord> rs{run("r", "m", "S", Trajectory{"B", "C", "A", "B"})};
    const auto cs = cluster_patterns(rs, cyc);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].order_only);
    CHECK(score_run(rs[0], cyc).asr == 1.0);
  }
  SUBCASE("unknown scenario") {
    std::vector<RunRecord> rs{run("r", "m", "T9", Trajectory{"CPA"})};
    CHECK_THROWS_AS(cluster_patterns(rs, spec), ValidationError);
  }
}

TEST_CASE("checkpoint_coverage") {
  const auto& spec = default_workflow();

  SUBCASE("all-shortcut corpus localizes the skipped round trip") {
    std::vector<RunRecord> rs;
    for (int i = 0; i < 20; ++i) rs.push_back(run("r" + std::to_string(i), "m", "T3", t3_shortcut()));
    const auto table = checkpoint_coverage(rs, spec, "T3");
    CHECK(table.n_runs == 20);
    REQUIRE(table.rows.size() == 10);
    // Frozen from the hand enumeration of the default T3 multisets: the
    // second (CPA,PaySup) and the second (PaySup,CPA) are never observed.
    const std::vector<double> expected{1, 1, 1, 1, 0, 1, 1, 1, 1, 0};
    for (std::size_t i = 0; i < 10; ++i) CHECK(table.rows[i].coverage == expected[i]);
    CHECK(table.rows[4].transition == tr("CPA", "PaySup"));
    CHECK(table.rows[4].occurrence == 2);
    CHECK(table.rows[9].transition == tr("PaySup", "CPA"));
    CHECK(table.rows[9].occurrence == 2);

    const auto skipped = skipped_checkpoints(table);
    REQUIRE(skipped.size() == 2);
    CHECK(skipped[0].transition == tr("CPA", "PaySup"));
    CHECK(skipped[1].transition == tr("PaySup", "CPA"));
  }
  SUBCASE("conforming corpus covers everything") {
    std::vector<RunRecord> rs{run("a", "m", "T3", t3_expected()), run("b", "m", "T3", t3_expected())};
    const auto table = checkpoint_coverage(rs, spec, "T3");
    for (const auto& row : table.rows) CHECK(row.coverage == 1.0);
    CHECK(skipped_checkpoints(table).empty());
  }
  SUBCASE("empty corpus has n = 0 and no rows") {
    const auto table = checkpoint_coverage({}, spec, "T3");
    CHECK(table.n_runs == 0);
    CHECK(table.rows.empty());
  }
  SUBCASE("only the requested scenario counts") {
    std::vector<RunRecord> rs{run("a", "m", "T3", t3_shortcut()), run("b", "m", "T1", Trajectory{"CPA"})};
    CHECK(checkpoint_coverage(rs, spec, "T3").n_runs == 1);
  }
  SUBCASE("unknown scenario") {
    CHECK_THROWS_AS(checkpoint_coverage({}, spec, "T7"), ValidationError);
  }
}
