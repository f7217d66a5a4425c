#include "trajfid/metrics.hpp"

#include <set>

#include "trajfid/error.hpp"

namespace trajfid {

namespace {

std::set<Transition> edge_set(const Trajectory& t) {
  std::set<Transition> edges;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) edges.insert(Transition{t[i], t[i + 1]});
  return edges;
}

double ratio_or_one(std::size_t num, std::size_t den) noexcept {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double f1(double precision, double recall) noexcept {
  const double sum = precision + recall;
  if (sum == 0.0) return 0.0;
  return 2.0 * precision * recall / sum;
}

double transition_recall(const TransitionMultiset& expected, const TransitionMultiset& observed) {
  return ratio_or_one(intersect(expected, observed).total_size(), expected.total_size());
}

double transition_precision(const TransitionMultiset& expected,
                            const TransitionMultiset& observed) {
  return ratio_or_one(intersect(expected, observed).total_size(), observed.total_size());
}

double asr(const TransitionMultiset& expected, const TransitionMultiset& observed) {
  if (expected.empty() && observed.empty()) return 1.0;
  return f1(transition_precision(expected, observed), transition_recall(expected, observed));
}

double hf1(const Trajectory& expected, const Trajectory& observed) {
  const auto e = edge_set(expected);
  const auto o = edge_set(observed);
  if (e.empty() && o.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& edge : o) common += e.count(edge);
  return f1(ratio_or_one(common, o.size()), ratio_or_one(common, e.size()));
}

ScoreRow score_trajectories(const Trajectory& expected, const Trajectory& observed,
                            bool success) {
  const auto be = transitions(expected);
  const auto bo = transitions(observed);
  ScoreRow row;
  row.tsr = success ? 1.0 : 0.0;
  row.hf1 = hf1(expected, observed);
  row.tr = transition_recall(be, bo);
  row.tp = transition_precision(be, bo);
  row.asr = (be.empty() && bo.empty()) ? 1.0 : f1(row.tp, row.tr);
  return row;
}

ScoreRow score_run(const RunRecord& record, const WorkflowSpec& spec) {
  const Scenario* scenario = spec.find_scenario(record.scenario);
  if (!scenario) {
    throw ValidationError("run '" + record.run_id + "': unknown scenario '" + record.scenario +
                          "'");
  }
  return score_trajectories(scenario->expected, record.trajectory, record.success);
}

}  // namespace trajfid
