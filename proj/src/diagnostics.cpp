#include "trajfid/diagnostics.hpp"

#include <algorithm>
#include <map>

#include "trajfid/error.hpp"

namespace trajfid {

namespace {

const Scenario& require_scenario(const WorkflowSpec& spec, std::string_view id) {
  const Scenario* s = spec.find_scenario(id);
  if (!s) throw ValidationError("unknown scenario '" + std::string(id) + "'");
  return *s;
}

}  // namespace

Deviation deviations(const Trajectory& expected, const Trajectory& observed) {
  const auto be = transitions(expected);
  const auto bo = transitions(observed);
  return Deviation{subtract(be, bo), subtract(bo, be)};
}

std::vector<PatternCluster> cluster_patterns(std::span<const RunRecord> records,
                                             const WorkflowSpec& spec) {
  std::vector<PatternCluster> clusters;
  std::map<Trajectory, std::size_t> index;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const Scenario& scenario = require_scenario(spec, r.scenario);
    if (r.trajectory == scenario.expected) continue;

    const bool same_multiset = transitions(r.trajectory) == transitions(scenario.expected);
    auto [it, inserted] = index.try_emplace(r.trajectory, clusters.size());
    if (inserted) {
      clusters.push_back(PatternCluster{r.trajectory, 0, {}, {}, same_multiset, i});
    }
    auto& c = clusters[it->second];
    ++c.count;
    c.scenarios.insert(r.scenario);
    c.models.insert(r.model);
    c.order_only = c.order_only && same_multiset;
  }

  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const PatternCluster& a, const PatternCluster& b) {
                     return a.count > b.count;
                   });
  return clusters;
}

CoverageTable checkpoint_coverage(std::span<const RunRecord> records, const WorkflowSpec& spec,
                                  std::string_view scenario) {
  const Scenario& s = require_scenario(spec, scenario);
  CoverageTable table;
  table.scenario = s.id;

  std::vector<TransitionMultiset> observed;
  for (const auto& r : records) {
    if (r.scenario == s.id) observed.push_back(transitions(r.trajectory));
  }
  table.n_runs = observed.size();
  if (observed.empty()) return table;

  std::map<Transition, std::size_t> seen;
  for (std::size_t i = 0; i + 1 < s.expected.size(); ++i) {
    Transition t{s.expected[i], s.expected[i + 1]};
    const std::size_t k = ++seen[t];
    const auto covered = static_cast<std::size_t>(std::count_if(
        observed.begin(), observed.end(),
        [&](const TransitionMultiset& m) { return m.count(t) >= k; }));
    table.rows.push_back(CoverageRow{std::move(t), k, covered,
                                     static_cast<double>(covered) /
                                         static_cast<double>(table.n_runs)});
  }
  return table;
}

std::vector<CoverageRow> skipped_checkpoints(const CoverageTable& table) {
  std::vector<CoverageRow> out;
  if (table.rows.empty()) return out;
  const auto lowest = std::min_element(table.rows.begin(), table.rows.end(),
                                       [](const CoverageRow& a, const CoverageRow& b) {
                                         return a.runs_covered < b.runs_covered;
                                       })
                          ->runs_covered;
  if (lowest == table.n_runs) return out;
  for (const auto& row : table.rows) {
    if (row.runs_covered == lowest) out.push_back(row);
  }
  return out;
}

}  // namespace trajfid
