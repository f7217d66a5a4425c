#pragma once

#include "trajfid/core.hpp"
#include "trajfid/workflow.hpp"

namespace trajfid {

// Per-run metric values, all ratios in [0, 1].
struct ScoreRow {
  double tsr = 0.0;  // 1 if the run reported success, else 0
  double hf1 = 0.0;
  double tr = 0.0;
  double tp = 0.0;
  double asr = 0.0;

  friend bool operator==(const ScoreRow&, const ScoreRow&) = default;
};

// Harmonic mean with the conventions used throughout: 0 when both are 0.
double f1(double precision, double recall) noexcept;

// |E ∩ O| / |E|; 1 when `expected` is empty.
double transition_recall(const TransitionMultiset& expected, const TransitionMultiset& observed);
// |E ∩ O| / |O|; 1 when `observed` is empty.
double transition_precision(const TransitionMultiset& expected,
                            const TransitionMultiset& observed);
// F1 of transition recall and precision. 1 when both multisets are empty.
double asr(const TransitionMultiset& expected, const TransitionMultiset& observed);

// Handoff F1 over the deduplicated edge sets of the two trajectories.
// Edge multiplicity and order are ignored.
double hf1(const Trajectory& expected, const Trajectory& observed);

ScoreRow score_trajectories(const Trajectory& expected, const Trajectory& observed,
                            bool success);

// Throws ValidationError naming the run when its scenario is not in `spec`.
ScoreRow score_run(const RunRecord& record, const WorkflowSpec& spec);

}  // namespace trajfid
