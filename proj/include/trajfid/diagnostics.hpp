#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajfid/core.hpp"
#include "trajfid/workflow.hpp"

namespace trajfid {

// Transition-level explanation of an ASR gap.
//   missing: expected but not observed (skipped handoffs, "model moves")
//   surplus: observed but not expected (redundant handoffs, "log moves")
struct Deviation {
  TransitionMultiset missing;
  TransitionMultiset surplus;

  bool conforming() const noexcept { return missing.empty() && surplus.empty(); }
};

Deviation deviations(const Trajectory& expected, const Trajectory& observed);

// Runs sharing one exact observed sequence that differs from the expected one.
struct PatternCluster {
  Trajectory trajectory;
  std::size_t count = 0;
  std::set<std::string> scenarios;
  std::set<std::string> models;
  // Every member run matches its expected transition multiset despite the
  // different sequence (ASR = 1), e.g. a rotated cycle.
  bool order_only = false;
  std::size_t first_index = 0;  // position of the first member in the input
};

// Non-conforming runs grouped by exact sequence, largest cluster first, ties
// by first occurrence. Throws ValidationError on an unknown scenario.
std::vector<PatternCluster> cluster_patterns(std::span<const RunRecord> records,
                                             const WorkflowSpec& spec);

struct CoverageRow {
  Transition transition;
  std::size_t occurrence = 1;  // k-th occurrence within the expected trajectory
  std::size_t runs_covered = 0;
  double coverage = 0.0;  // runs_covered / n_runs
};

struct CoverageTable {
  std::string scenario;
  std::size_t n_runs = 0;  // 0 means empty corpus; rows are then empty too
  std::vector<CoverageRow> rows;
};

// For every expected transition occurrence (in trajectory order), the share
// of the scenario's runs that observed that transition at least `occurrence`
// times. Throws ValidationError on an unknown scenario.
CoverageTable checkpoint_coverage(std::span<const RunRecord> records, const WorkflowSpec& spec,
                                  std::string_view scenario);

// Rows with the lowest coverage, provided it is below 1; empty otherwise.
std::vector<CoverageRow> skipped_checkpoints(const CoverageTable& table);

}  // namespace trajfid
