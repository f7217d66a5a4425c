#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "trajfid/error.hpp"
#include "trajfid/metrics.hpp"
#include "trajfid/workflow.hpp"

using namespace trajfid;
using trajfid::testing::t3_expected;
using trajfid::testing::t3_shortcut;
using trajfid::testing::tr;

TEST_CASE("transition recall") {
  const auto be = transitions(t3_expected());
  const auto bo = transitions(t3_shortcut());
  CHECK(total_size(be) == 10);
  CHECK(total_size(bo) == 8);
  CHECK(transition_recall(be, bo) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(transition_recall(be, be) == 1.0);
  CHECK(transition_recall({}, {}) == 1.0);
}

TEST_CASE("transition precision") {
  const auto be = transitions(t3_expected());
  const auto bo = transitions(t3_shortcut());
  CHECK(transition_precision(be, bo) == 1.0);
  CHECK(transition_precision(transitions({"A", "B"}), transitions({"C", "D"})) == 0.0);
  CHECK(transition_precision(be, {}) == 1.0);

  std::mt19937_64 gen(7);
  for (int i = 0; i < 500; ++i) {
    const auto a = transitions(trajfid::testing::random_trajectory(gen, 4, 1, 8));
    const auto b = transitions(trajfid::testing::random_trajectory(gen, 4, 1, 8));
    CHECK(transition_precision(a, b) == transition_recall(b, a));
  }
}

TEST_CASE("asr") {
  const auto be = transitions(t3_expected());
  CHECK(asr(be, transitions(t3_shortcut())) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(asr(be, be) == 1.0);
  CHECK(asr(transitions({"A", "B"}), transitions({"B", "A"})) == 0.0);
  CHECK(asr({}, {}) == 1.0);
  CHECK(f1(0.0, 0.0) == 0.0);
  CHECK(f1(0.8, 1.0) == doctest::Approx(0.888888888888889));
}

TEST_CASE("hf1 on deduplicated edge sets") {
  SUBCASE("the confirmation shortcut keeps the edge set") {
    CHECK(hf1(t3_expected(), t3_shortcut()) == 1.0);
  }
  SUBCASE("identical trajectories") { CHECK(hf1(t3_expected(), t3_expected()) == 1.0); }
  SUBCASE("two of eight distinct edges missing") {
    // Expected edges: A-B B-C C-D D-E E-F F-G G-H H-I (8 distinct).
    // Observed edges: C-D D-E E-F F-G G-H H-I (6, all expected).
    const Trajectory e{"A", "B", "C", "D", "E", "F", "G", "H", "I"};
    const Trajectory o{"C", "D", "E", "F", "G", "H", "I"};
    // recall 6/8, precision 6/6, F1 = 2*0.75/(1.75)
    CHECK(hf1(e, o) == doctest::Approx(2.0 * 0.75 * 1.0 / 1.75).epsilon(1e-12));
    CHECK(hf1(e, o) == doctest::Approx(0.857142857142857));
  }
  SUBCASE("single-agent trajectories") { CHECK(hf1({"CPA"}, {"CPA"}) == 1.0); }
  SUBCASE("multiplicity is ignored") {
    CHECK(hf1({"A", "B", "A", "B", "A"}, {"A", "B", "A"}) == 1.0);
  }
}

TEST_CASE("score_run") {
  const auto& spec = default_workflow();
  auto record = [](Trajectory t, bool ok) {
    return RunRecord{.run_id = "r", .model = "m", .scenario = "T3", .repeat = 0,
                     .trajectory = std::move(t), .success = ok, .meta = std::nullopt};
  };

  SUBCASE("exact trajectory") {
    CHECK(score_run(record(t3_expected(), true), spec) == ScoreRow{1, 1, 1, 1, 1});
  }
  SUBCASE("nine-hop shortcut") {
    const auto s = score_run(record(t3_shortcut(), true), spec);
    CHECK(s.tsr == 1.0);
    CHECK(s.hf1 == 1.0);
    CHECK(s.tr == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(s.tp == 1.0);
    CHECK(s.asr == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  }
  SUBCASE("failed run on the right path") {
    CHECK(score_run(record(t3_expected(), false), spec) == ScoreRow{0, 1, 1, 1, 1});
  }
  SUBCASE("unknown scenario names the run") {
    auto r = record(t3_expected(), true);
    r.scenario = "T9";
    r.run_id = "run-42";
    CHECK_THROWS_WITH_AS(score_run(r, spec), doctest::Contains("run-42"), ValidationError);
  }
}

TEST_CASE("metric properties on random pairs") {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 3000; ++i) {
    const auto e = trajfid::testing::random_trajectory(gen, 4, 1, 8);
    const auto o = trajfid::testing::random_trajectory(gen, 4, 1, 8);
    const auto s = score_trajectories(e, o, true);
    for (double v : {s.tr, s.tp, s.asr, s.hf1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(s.asr >= std::min(s.tr, s.tp) - 1e-15);
    CHECK(s.asr <= std::max(s.tr, s.tp) + 1e-15);
    CHECK(asr(transitions(e), transitions(o)) == asr(transitions(o), transitions(e)));

    const auto self = score_trajectories(e, e, true);
    CHECK(self == ScoreRow{1, 1, 1, 1, 1});
  }
}

TEST_CASE("intersection size matches the brute-force matching oracle") {
  std::mt19937_64 gen(12345);
  for (int i = 0; i < 3000; ++i) {
    const auto e = trajfid::testing::random_trajectory(gen, 4, 1, 7);
    const auto o = trajfid::testing::random_trajectory(gen, 4, 1, 7);
    const auto oracle = trajfid::testing::brute_force_matching(trajfid::testing::raw_pairs(e),
                                                               trajfid::testing::raw_pairs(o));
    CHECK(total_size(intersect(transitions(e), transitions(o))) == oracle);
  }
}

TEST_CASE("hidden-shortcut property: deleting a duplicated round trip") {
  // For every trajectory with a round trip X->Y->X whose edges also occur
  // elsewhere, removing the round trip keeps HF1 at 1 but lowers ASR.
  std::mt19937_64 gen(2024);
  int found = 0;
  for (int iter = 0; iter < 20000 && found < 300; ++iter) {
    const auto e = trajfid::testing::random_trajectory(gen, 3, 4, 10);
    const auto be = transitions(e);
    for (std::size_t i = 0; i + 2 < e.size(); ++i) {
      if (e[i] != e[i + 2] || e[i] == e[i + 1]) continue;
      const Transition xy{e[i], e[i + 1]}, yx{e[i + 1], e[i]};
      if (be.count(xy) < 2 || be.count(yx) < 2) continue;
      std::vector<AgentId> steps = e.steps();
      steps.erase(steps.begin() + static_cast<std::ptrdiff_t>(i + 1),
                  steps.begin() + static_cast<std::ptrdiff_t>(i + 3));
      const Trajectory o(std::move(steps));
      CHECK(hf1(e, o) == 1.0);
      CHECK(asr(be, transitions(o)) < 1.0);
      ++found;
      break;
    }
  }
  CHECK(found > 50);
}
