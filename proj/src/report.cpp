#include "trajfid/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "trajfid/csv.hpp"
#include "trajfid/error.hpp"

namespace trajfid {

namespace {

// Adds one unit in the last place to a string of decimal digits; returns true
// on carry out of the most significant digit.
bool increment_digits(std::string& digits) {
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (*it == '9') {
      *it = '0';
    } else {
      ++*it;
      return false;
    }
  }
  return true;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

// Mean of run-level values in percent; sorted first so the sum does not
// depend on input order.
double percent_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return 100.0 * sum / static_cast<double>(values.size());
}

using Levels = std::array<double, 3>;  // tsr, hf1, asr at one repeat

std::vector<std::string> ordered_scenarios(const std::set<std::string>& present,
                                           const std::vector<std::string>& preferred) {
  std::vector<std::string> out;
  for (const auto& s : preferred) {
    if (present.count(s) && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  for (const auto& s : present) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

const std::string& kAvg() {
  static const std::string avg(kAverageScenario);
  return avg;
}

std::string cell(const MetricSummary& m, std::size_t n) {
  std::string out = format_fixed(m.mean, 2) + " ± " + format_fixed(m.std, 2);
  if (n == 1) out += " (n=1)";
  return out;
}

// Models in display order.
std::vector<std::string> model_order(std::span<const AggregateRow> rows, bool by_avg_asr) {
  std::map<std::string, double> key;
  std::map<std::string, std::pair<double, std::size_t>> fallback;
  for (const auto& r : rows) {
    if (r.is_average()) {
      key[r.model] = r.asr.mean;
    } else {
      auto& f = fallback[r.model];
      f.first += r.asr.mean;
      ++f.second;
    }
  }
  std::vector<std::pair<std::string, double>> models;
  std::set<std::string> names;
  for (const auto& r : rows) names.insert(r.model);
  for (const auto& m : names) {
    double k = 0.0;
    if (auto it = key.find(m); it != key.end()) {
      k = it->second;
    } else if (auto f = fallback.find(m); f != fallback.end() && f->second.second) {
      k = f->second.first / static_cast<double>(f->second.second);
    }
    models.emplace_back(m, k);
  }
  if (by_avg_asr) {
    std::stable_sort(models.begin(), models.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
  }
  std::vector<std::string> out;
  for (auto& [m, k] : models) out.push_back(m);
  return out;
}

double parse_number(std::string_view text, std::size_t row, std::string_view column) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ValidationError("row " + std::to_string(row) + ": column '" + std::string(column) +
                          "' is not a number: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  const bool negative = std::signbit(value);
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::fixed);
  std::string repr(buf, ec == std::errc() ? end : buf);

  const auto dot = repr.find('.');
  std::string int_part = dot == std::string::npos ? repr : repr.substr(0, dot);
  std::string frac = dot == std::string::npos ? std::string() : repr.substr(dot + 1);
  const auto keep = static_cast<std::size_t>(std::max(decimals, 0));

  if (frac.size() > keep) {
    const char first_dropped = frac[keep];
    const bool rest_nonzero =
        frac.find_first_not_of('0', keep + 1) != std::string::npos;
    std::string kept = int_part + frac.substr(0, keep);
    const bool last_odd = (kept.back() - '0') % 2 == 1;
    bool round_up = first_dropped > '5' || (first_dropped == '5' && (rest_nonzero || last_odd));
    if (round_up && increment_digits(kept)) kept.insert(kept.begin(), '1');
    int_part = kept.substr(0, kept.size() - keep);
    frac = kept.substr(kept.size() - keep);
  } else {
    frac.append(keep - frac.size(), '0');
  }

  std::string out = int_part;
  if (keep) out += "." + frac;
  const bool all_zero = out.find_first_not_of("0.") == std::string::npos;
  if (negative && !all_zero) out.insert(out.begin(), '-');
  return out;
}

std::string format_signed(double value, int decimals) {
  std::string s = format_fixed(value, decimals);
  if (s.front() != '-') s.insert(s.begin(), '+');
  return s;
}

std::vector<ScoredRun> score_runs(std::span<const RunRecord> records, const WorkflowSpec& spec) {
  std::vector<ScoredRun> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(ScoredRun{r.model, r.scenario, r.repeat, score_run(r, spec)});
  }
  return out;
}

std::vector<AggregateRow> aggregate(std::span<const ScoredRun> runs,
                                    const AggregateOptions& options) {
  // model -> scenario -> repeat -> runs
  std::map<std::string, std::map<std::string, std::map<std::uint64_t, std::vector<ScoreRow>>>>
      groups;
  for (const auto& r : runs) groups[r.model][r.scenario][r.repeat].push_back(r.score);

  std::vector<AggregateRow> out;
  for (const auto& [model, by_scenario] : groups) {
    std::set<std::string> present;
    for (const auto& [s, _] : by_scenario) present.insert(s);
    if (options.require_all) {
      for (const auto& s : options.scenario_order) {
        if (!present.count(s)) {
          throw ValidationError("model '" + model + "' has no runs for scenario '" + s + "'");
        }
      }
    }

    std::vector<std::map<std::uint64_t, Levels>> scenario_levels;
    std::array<double, 3> mean_sum{};
    const auto scenarios = ordered_scenarios(present, options.scenario_order);
    for (const auto& scenario : scenarios) {
      std::map<std::uint64_t, Levels> levels;
      std::array<std::vector<double>, 3> per_metric;
      for (const auto& [repeat, scores] : by_scenario.at(scenario)) {
        std::array<std::vector<double>, 3> values;
        for (const auto& s : scores) {
          values[0].push_back(s.tsr);
          values[1].push_back(s.hf1);
          values[2].push_back(s.asr);
        }
        Levels l{};
        for (std::size_t m = 0; m < 3; ++m) {
          l[m] = percent_mean(std::move(values[m]));
          per_metric[m].push_back(l[m]);
        }
        levels[repeat] = l;
      }
      AggregateRow row{model, scenario, summarize(per_metric[0]), summarize(per_metric[1]),
                       summarize(per_metric[2]), levels.size()};
      mean_sum[0] += row.tsr.mean;
      mean_sum[1] += row.hf1.mean;
      mean_sum[2] += row.asr.mean;
      scenario_levels.push_back(std::move(levels));
      out.push_back(std::move(row));
    }

    // Repeats shared by every scenario of this model.
    std::vector<std::uint64_t> common;
    for (const auto& [repeat, _] : scenario_levels.front()) {
      if (std::all_of(scenario_levels.begin(), scenario_levels.end(),
                      [&](const auto& l) { return l.count(repeat) > 0; })) {
        common.push_back(repeat);
      }
    }
    std::array<std::vector<double>, 3> avg_levels;
    for (auto repeat : common) {
      for (std::size_t m = 0; m < 3; ++m) {
        double sum = 0.0;
        for (const auto& l : scenario_levels) sum += l.at(repeat)[m];
        avg_levels[m].push_back(sum / static_cast<double>(scenario_levels.size()));
      }
    }
    const double k = static_cast<double>(scenarios.size());
    AggregateRow avg{model, kAvg(), {}, {}, {}, common.size()};
    MetricSummary* targets[3] = {&avg.tsr, &avg.hf1, &avg.asr};
    for (std::size_t m = 0; m < 3; ++m) {
      targets[m]->mean = mean_sum[m] / k;
      targets[m]->std = summarize(avg_levels[m]).std;
    }
    out.push_back(std::move(avg));
  }
  return out;
}

bool hidden_deviation(const AggregateRow& row) {
  return format_fixed(row.tsr.mean, 2) == "100.00" && format_fixed(row.hf1.mean, 2) == "100.00" &&
         format_fixed(row.asr.mean, 2) != "100.00";
}

std::string render(std::span<const AggregateRow> rows, const RenderOptions& options) {
  const auto models = model_order(rows, options.sort_by_avg_asr);
  std::ostringstream os;

  if (options.format == TableFormat::csv) {
    os << "model,scenario,tsr_mean,tsr_std,hf1_mean,hf1_std,asr_mean,asr_std,n_repeats,"
          "hidden_deviation\n";
    for (const auto& model : models) {
      for (const auto& r : rows) {
        if (r.model != model) continue;
        os << csv_field(r.model) << ',' << csv_field(r.scenario) << ','
           << format_fixed(r.tsr.mean, 2) << ',' << format_fixed(r.tsr.std, 2) << ','
           << format_fixed(r.hf1.mean, 2) << ',' << format_fixed(r.hf1.std, 2) << ','
           << format_fixed(r.asr.mean, 2) << ',' << format_fixed(r.asr.std, 2) << ','
           << r.n_repeats << ',' << ((options.highlight && hidden_deviation(r)) ? "true" : "false")
           << '\n';
      }
    }
    return os.str();
  }

  std::vector<std::string> groups = options.markdown_scenarios;
  if (groups.empty()) {
    for (const auto& r : rows) {
      if (!r.is_average() && std::find(groups.begin(), groups.end(), r.scenario) == groups.end()) {
        groups.push_back(r.scenario);
      }
    }
    groups.push_back(kAvg());
  }

  os << "| Model |";
  for (const auto& g : groups) os << ' ' << g << " TSR | " << g << " HF1 | " << g << " ASR |";
  if (options.highlight) os << " Hidden deviation |";
  os << "\n|---|";
  for (std::size_t i = 0; i < groups.size(); ++i) os << "---:|---:|---:|";
  if (options.highlight) os << "---|";
  os << '\n';

  for (const auto& model : models) {
    os << "| " << model << " |";
    std::vector<std::string> flagged;
    for (const auto& g : groups) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& r) {
        return r.model == model && r.scenario == g;
      });
      if (it == rows.end()) {
        os << " – | – | – |";
        continue;
      }
      os << ' ' << cell(it->tsr, it->n_repeats) << " | " << cell(it->hf1, it->n_repeats) << " | "
         << cell(it->asr, it->n_repeats) << " |";
      if (hidden_deviation(*it)) flagged.push_back("**" + g + "**");
    }
    if (options.highlight) {
      os << ' ';
      for (std::size_t i = 0; i < flagged.size(); ++i) os << (i ? ", " : "") << flagged[i];
      os << (flagged.empty() ? "|" : " |");
    }
    os << '\n';
  }
  os << "\nValues in %, mean ± sample std over repeats."
     << (options.sort_by_avg_asr ? " Sorted by Avg ASR desc." : "")
     << (options.highlight ? " Hidden deviation: TSR = HF1 = 100.00 but ASR < 100.00." : "")
     << '\n';
  return os.str();
}

DeltaReport compare_delta(std::span<const ValueCell> baseline, std::span<const ValueCell> ours) {
  using Key = std::pair<std::string, std::string>;
  auto index = [](std::span<const ValueCell> cells, const char* side) {
    std::map<Key, double> out;
    for (const auto& c : cells) {
      if (!out.emplace(Key{c.model, c.scenario}, c.value).second) {
        throw ValidationError(std::string("duplicate ") + side + " entry for model '" + c.model +
                              "', scenario '" + c.scenario + "'");
      }
    }
    return out;
  };
  const auto base = index(baseline, "baseline");
  const auto mine = index(ours, "ours");

  DeltaReport report;
  std::map<std::string, std::vector<DeltaRow>> by_model;
  for (const auto& [key, h] : base) {
    auto it = mine.find(key);
    if (it == mine.end()) {
      report.unmatched.push_back(UnmatchedKey{key.first, key.second, true});
      continue;
    }
    by_model[key.first].push_back(DeltaRow{key.first, key.second, h, it->second, it->second - h});
  }
  for (const auto& [key, o] : mine) {
    if (!base.count(key)) report.unmatched.push_back(UnmatchedKey{key.first, key.second, false});
  }

  for (const auto& [model, rows] : by_model) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r.delta;
    report.ranking.push_back(ModelDelta{model, sum / static_cast<double>(rows.size())});
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const ModelDelta& a, const ModelDelta& b) {
                     return a.average_delta > b.average_delta;
                   });
  for (const auto& m : report.ranking) {
    for (auto& r : by_model[m.model]) report.rows.push_back(std::move(r));
  }
  return report;
}

std::vector<ValueCell> read_value_table(std::string_view csv_text, std::string_view metric) {
  const auto table = parse_csv(csv_text);
  if (table.empty()) throw ValidationError("value table is empty (no header row)");
  const auto& header = table.front();
  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const auto model_col = column("model");
  const auto scenario_col = column("scenario");
  const std::string mean_name = std::string(metric) + "_mean";
  auto value_col = column(mean_name);
  std::string value_name = mean_name;
  if (value_col < 0) {
    value_col = column(metric);
    value_name = std::string(metric);
  }
  if (model_col < 0 || scenario_col < 0 || value_col < 0) {
    throw ValidationError("value table header must contain 'model', 'scenario' and '" +
                          mean_name + "' or '" + std::string(metric) + "'");
  }

  std::vector<ValueCell> out;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& row = table[i];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != header.size()) {
      throw ValidationError("row " + std::to_string(i + 1) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(row.size()));
    }
    if (row[static_cast<std::size_t>(scenario_col)] == kAverageScenario) continue;
    out.push_back(ValueCell{row[static_cast<std::size_t>(model_col)],
                            row[static_cast<std::size_t>(scenario_col)],
                            parse_number(row[static_cast<std::size_t>(value_col)], i + 1,
                                         value_name)});
  }
  return out;
}

std::string render_delta(const DeltaReport& report, TableFormat format, int decimals) {
  std::ostringstream os;
  if (format == TableFormat::csv) {
    os << "model,scenario,baseline,ours,delta\n";
    for (const auto& r : report.rows) {
      os << csv_field(r.model) << ',' << csv_field(r.scenario) << ','
         << format_fixed(r.baseline, decimals) << ',' << format_fixed(r.ours, decimals) << ','
         << format_signed(r.delta, decimals) << '\n';
    }
    return os.str();
  }

  std::set<std::string> scenario_set;
  for (const auto& r : report.rows) scenario_set.insert(r.scenario);
  os << "| Model |";
  for (const auto& s : scenario_set) os << ' ' << s << " H | " << s << " O | " << s << " Δ |";
  os << "\n|---|";
  for (std::size_t i = 0; i < scenario_set.size(); ++i) os << "---:|---:|---:|";
  os << '\n';
  for (const auto& m : report.ranking) {
    os << "| " << m.model << " |";
    for (const auto& s : scenario_set) {
      auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const DeltaRow& r) {
        return r.model == m.model && r.scenario == s;
      });
      if (it == report.rows.end()) {
        os << " – | – | – |";
        continue;
      }
      const auto delta = format_signed(it->delta, decimals);
      os << ' ' << format_fixed(it->baseline, decimals) << " | "
         << format_fixed(it->ours, decimals) << " | "
         << (it->delta >= 20.0 ? "**" + delta + "**" : delta) << " |";
    }
    os << '\n';
  }
  os << "\nH = baseline, O = ours, Δ = O - H (pp). Rows ranked by average Δ. Bold: ≥ 20 pp.\n";
  if (!report.unmatched.empty()) {
    os << "\nUnmatched keys (excluded):\n";
    for (const auto& u : report.unmatched) {
      os << "- " << u.model << " / " << u.scenario
         << (u.in_baseline ? " (baseline only)" : " (ours only)") << '\n';
    }
  }
  return os.str();
}

}  // namespace trajfid
