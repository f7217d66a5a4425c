#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajfid/metrics.hpp"

namespace trajfid {

inline constexpr std::string_view kAverageScenario = "Avg";

// Fixed-point rendering with round-half-to-even applied to the shortest
// decimal representation of `value` (so 0.125 -> "0.12", 0.135 -> "0.14").
std::string format_fixed(double value, int decimals);
// As format_fixed, with an explicit leading '+' for values that render >= 0.
std::string format_signed(double value, int decimals);

struct ScoredRun {
  std::string model;
  std::string scenario;
  std::uint64_t repeat = 0;
  ScoreRow score;
};

// Scores every record; throws ValidationError for an unknown scenario.
std::vector<ScoredRun> score_runs(std::span<const RunRecord> records, const WorkflowSpec& spec);

struct MetricSummary {
  double mean = 0.0;  // percent
  double std = 0.0;   // sample standard deviation, percentage points
};

struct AggregateRow {
  std::string model;
  std::string scenario;  // or "Avg"
  MetricSummary tsr;
  MetricSummary hf1;
  MetricSummary asr;
  std::size_t n_repeats = 0;

  bool is_average() const noexcept { return scenario == kAverageScenario; }
};

struct AggregateOptions {
  // Scenario row order within a model; scenarios not listed follow in
  // lexicographic order.
  std::vector<std::string> scenario_order;
  // When set, every model must have runs for every scenario in
  // scenario_order; a missing group throws ValidationError.
  bool require_all = false;
};

// Run-mean per (model, scenario, repeat), then mean and sample (n-1) standard
// deviation across repeats. Each model also gets an "Avg" row: its mean is the
// unweighted mean of the scenario means; its std is taken over the per-repeat
// cross-scenario averages of the repeats every scenario has. Result is
// independent of input order; models are sorted by name.
std::vector<AggregateRow> aggregate(std::span<const ScoredRun> runs,
                                    const AggregateOptions& options = {});

// Rendered TSR and HF1 are 100.00 while rendered ASR is below 100.00.
bool hidden_deviation(const AggregateRow& row);

enum class TableFormat { csv, markdown };

struct RenderOptions {
  TableFormat format = TableFormat::csv;
  // Avg ASR descending (ties by name), or plain model name order.
  bool sort_by_avg_asr = true;
  bool highlight = true;
  // Markdown column groups; empty means every scenario present plus Avg.
  std::vector<std::string> markdown_scenarios;
};

// CSV columns: model, scenario, tsr_mean, tsr_std, hf1_mean, hf1_std,
// asr_mean, asr_std, n_repeats, hidden_deviation.
std::string render(std::span<const AggregateRow> rows, const RenderOptions& options = {});

// ---- baseline vs ours -----------------------------------------------------

struct ValueCell {
  std::string model;
  std::string scenario;
  double value = 0.0;
};

struct DeltaRow {
  std::string model;
  std::string scenario;
  double baseline = 0.0;
  double ours = 0.0;
  double delta = 0.0;  // ours - baseline
};

struct ModelDelta {
  std::string model;
  double average_delta = 0.0;
};

struct UnmatchedKey {
  std::string model;
  std::string scenario;
  bool in_baseline = false;  // otherwise only in ours
};

struct DeltaReport {
  std::vector<DeltaRow> rows;        // grouped by ranking, scenarios sorted
  std::vector<ModelDelta> ranking;   // average delta descending, ties by name
  std::vector<UnmatchedKey> unmatched;
};

// Throws ValidationError on a duplicate key within one side.
DeltaReport compare_delta(std::span<const ValueCell> baseline, std::span<const ValueCell> ours);

// Reads (model, scenario, value) cells from CSV text with a header that names
// "model", "scenario" and either "<metric>_mean" or "<metric>". Rows for the
// "Avg" pseudo-scenario are skipped.
std::vector<ValueCell> read_value_table(std::string_view csv_text, std::string_view metric);

// CSV: model, scenario, baseline, ours, delta. Markdown: one row per model
// with H / O / delta column groups per scenario; deltas >= 20 in bold.
std::string render_delta(const DeltaReport& report, TableFormat format, int decimals = 1);

}  // namespace trajfid
