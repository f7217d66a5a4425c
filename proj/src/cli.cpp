#include "trajfid/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "trajfid/diagnostics.hpp"
#include "trajfid/error.hpp"
#include "trajfid/logio.hpp"
#include "trajfid/metrics.hpp"
#include "trajfid/report.hpp"
#include "trajfid/simulator.hpp"

namespace trajfid {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string spec;
  std::string profiles;
  std::vector<std::string> logs;
  std::string out;
  std::string format;
  std::vector<std::string> scenarios;
  std::uint64_t runs = 250;
  std::uint64_t repeats = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool lenient = false;
  bool version_header = false;
  std::string sort = "avg-asr";
  std::string baseline;
  std::string ours;
  std::string metric = "tsr";
  int decimals = 1;
};

TableFormat resolve_format(const std::string& flag, const std::string& out_path) {
  if (flag == "csv") return TableFormat::csv;
  if (flag == "md" || flag == "markdown") return TableFormat::markdown;
  const auto ext = fs::path(out_path).extension().string();
  return ext == ".md" ? TableFormat::markdown : TableFormat::csv;
}

// Loads every log and checks scenario references. Strict mode throws on the
// first problem; lenient mode reports and skips.
std::vector<RunRecord> load_logs(const Options& o, const WorkflowSpec& spec, std::ostream& err) {
  std::vector<RunRecord> records;
  for (const auto& path : o.logs) {
    RunLog log;
    try {
      log = read_run_log_file(path, !o.lenient);
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": " + e.what());
    }
    for (const auto& e : log.errors) err << "warning: " << path << ": skipped " << e.describe() << '\n';
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      auto& r = log.records[i];
      if (!spec.find_scenario(r.scenario)) {
        const std::string msg = path + ": line " + std::to_string(log.lines[i]) + ": run '" +
                                r.run_id + "' references unknown scenario '" + r.scenario + "'";
        if (!o.lenient) throw ValidationError(msg);
        err << "warning: skipped " << msg << '\n';
        continue;
      }
      if (!o.scenarios.empty() &&
          std::find(o.scenarios.begin(), o.scenarios.end(), r.scenario) == o.scenarios.end()) {
        continue;
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

void check_scenario_filter(const Options& o, const WorkflowSpec& spec) {
  for (const auto& s : o.scenarios) {
    if (!spec.find_scenario(s)) throw ValidationError("unknown scenario '" + s + "'");
  }
}

std::vector<std::string> scenario_ids(const WorkflowSpec& spec) {
  std::vector<std::string> ids;
  for (const auto& s : spec.scenarios) ids.push_back(s.id);
  return ids;
}

int cmd_simulate(const Options& o, std::ostream& err) {
  const auto spec = read_workflow_spec_file(o.spec);
  std::vector<ModelProfile> profiles;
  if (!o.profiles.empty()) {
    profiles = read_profiles_file(o.profiles);
  } else if (spec.sim && !spec.sim->profiles.empty()) {
    profiles = spec.sim->profiles;
  } else {
    throw ValidationError("no profiles: pass --profiles or add sim.profiles to the workflow");
  }
  check_scenario_filter(o, spec);
  SimConfig config{o.seed, o.runs, o.repeats, o.scenarios};
  const auto records = simulate_corpus(spec, profiles, config, o.threads);
  write_run_log_file(records, o.out, WriteOptions{o.version_header});
  err << "simulated " << records.size() << " runs -> " << o.out << '\n';
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& err) {
  const auto spec = read_workflow_spec_file(o.spec);
  check_scenario_filter(o, spec);
  const auto records = load_logs(o, spec, err);
  const auto scored = score_runs(records, spec);
  const auto rows = aggregate(scored, AggregateOptions{scenario_ids(spec), false});
  RenderOptions ro;
  ro.format = resolve_format(o.format, o.out);
  ro.sort_by_avg_asr = o.sort != "model";
  write_text_file(o.out, render(rows, ro));
  err << "scored " << records.size() << " runs -> " << o.out << '\n';
  return kExitOk;
}

std::string percent(double ratio) { return format_fixed(100.0 * ratio, 2); }

std::string diagnose_markdown(const std::vector<RunRecord>& records, const WorkflowSpec& spec,
                              const std::vector<std::string>& scenarios) {
  std::ostringstream os;
  os << "# Trajectory diagnostics\n\n";

  os << "## Scenarios\n\n"
     << "| Scenario | Runs | Deviant sequences | TR (%) | TP (%) | ASR (%) | Expected |\n"
     << "|---|---:|---:|---:|---:|---:|---|\n";
  for (const auto& id : scenarios) {
    const Scenario& s = *spec.find_scenario(id);
    std::size_t n = 0, deviant = 0;
    double tr = 0, tp = 0, a = 0;
    for (const auto& r : records) {
      if (r.scenario != id) continue;
      ++n;
      if (r.trajectory != s.expected) ++deviant;
      const auto row = score_run(r, spec);
      tr += row.tr;
      tp += row.tp;
      a += row.asr;
    }
    const double d = n ? static_cast<double>(n) : 1.0;
    os << "| " << id << " | " << n << " | " << deviant << " | "
       << (n ? percent(tr / d) : "–") << " | " << (n ? percent(tp / d) : "–") << " | "
       << (n ? percent(a / d) : "–") << " | " << to_string(s.expected) << " |\n";
  }

  const auto clusters = cluster_patterns(records, spec);
  os << "\n## Deviant trajectory patterns\n\n"
     << "Distinct deviant patterns: " << clusters.size() << "\n\n";
  if (!clusters.empty()) {
    os << "| # | Runs | Scenarios | Models | TR (%) | TP (%) | ASR (%) | HF1 (%) | Missing | "
          "Surplus | Order-only | Trajectory |\n"
       << "|---:|---:|---|---|---:|---:|---:|---:|---|---|---|---|\n";
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      const auto& c = clusters[i];
      // Scored against the first scenario the pattern occurred in.
      const Scenario& s = *spec.find_scenario(records[c.first_index].scenario);
      const auto row = score_trajectories(s.expected, c.trajectory, true);
      const auto dev = deviations(s.expected, c.trajectory);
      auto join = [](const std::set<std::string>& xs) {
        std::string out;
        for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
        return out;
      };
      os << "| " << i + 1 << " | " << c.count << " | " << join(c.scenarios) << " | "
         << join(c.models) << " | " << percent(row.tr) << " | " << percent(row.tp) << " | "
         << percent(row.asr) << " | " << percent(row.hf1) << " | " << to_string(dev.missing)
         << " | " << to_string(dev.surplus) << " | " << (c.order_only ? "yes" : "no") << " | "
         << to_string(c.trajectory) << " |\n";
    }
  }

  for (const auto& id : scenarios) {
    const auto table = checkpoint_coverage(records, spec, id);
    os << "\n## Checkpoint coverage: " << id << " (n=" << table.n_runs << ")\n\n";
    if (table.n_runs == 0) {
      os << "No runs.\n";
      continue;
    }
    if (table.rows.empty()) {
      os << "Expected trajectory has no transitions.\n";
      continue;
    }
    os << "| Transition | Occurrence | Runs covered | Coverage (%) |\n"
       << "|---|---:|---:|---:|\n";
    for (const auto& r : table.rows) {
      os << "| " << to_string(r.transition) << " | " << r.occurrence << " | " << r.runs_covered
         << " | " << percent(r.coverage) << " |\n";
    }
    const auto skipped = skipped_checkpoints(table);
    if (skipped.empty()) {
      os << "\nNo systematically skipped checkpoints.\n";
    } else {
      os << "\nLowest coverage (" << percent(skipped.front().coverage) << "%):";
      for (const auto& r : skipped) os << ' ' << to_string(r.transition) << '#' << r.occurrence;
      os << '\n';
    }
  }
  return os.str();
}

int cmd_diagnose(const Options& o, std::ostream& err) {
  const auto spec = read_workflow_spec_file(o.spec);
  check_scenario_filter(o, spec);
  const auto records = load_logs(o, spec, err);
  const auto scenarios = o.scenarios.empty() ? scenario_ids(spec) : o.scenarios;
  write_text_file(o.out, diagnose_markdown(records, spec, scenarios));
  err << "diagnosed " << records.size() << " runs -> " << o.out << '\n';
  return kExitOk;
}

int cmd_report_delta(const Options& o, std::ostream& err) {
  const auto baseline = read_value_table(read_text_file(o.baseline), o.metric);
  const auto ours = read_value_table(read_text_file(o.ours), o.metric);
  const auto report = compare_delta(baseline, ours);
  for (const auto& u : report.unmatched) {
    err << "warning: unmatched " << u.model << " / " << u.scenario
        << (u.in_baseline ? " (baseline only)" : " (ours only)") << '\n';
  }
  write_text_file(o.out, render_delta(report, resolve_format(o.format, o.out), o.decimals));
  err << "compared " << report.rows.size() << " cells -> " << o.out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow-fidelity scoring, diagnostics and simulation for agent trajectories",
               "trajfid"};
  app.require_subcommand(1);
  Options o;

  const auto formats = CLI::IsMember({"csv", "md", "markdown"});

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic run log");
  sim->add_option("--spec", o.spec, "Workflow JSON")->required();
  sim->add_option("--profiles", o.profiles, "Model profile JSON (default: sim.profiles)");
  sim->add_option("--runs", o.runs, "Runs per scenario and repeat")->capture_default_str();
  sim->add_option("--repeats", o.repeats, "Independent repeats")->capture_default_str();
  sim->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  sim->add_option("--scenario", o.scenarios, "Restrict to scenario (repeatable)");
  sim->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  sim->add_flag("--version-header", o.version_header, "Write a format_version first line");
  sim->add_option("--out", o.out, "Output JSONL")->required();

  auto* score = app.add_subcommand("score", "Aggregate TSR/HF1/ASR per model and scenario");
  score->add_option("--spec", o.spec, "Workflow JSON")->required();
  score->add_option("--logs", o.logs, "Run log(s)")->required();
  score->add_option("--out", o.out, "Output table")->required();
  score->add_option("--format", o.format, "csv or md (default: from --out)")->check(formats);
  score->add_option("--scenario", o.scenarios, "Restrict to scenario (repeatable)");
  score->add_option("--sort", o.sort, "avg-asr or model")
      ->check(CLI::IsMember({"avg-asr", "model"}))
      ->capture_default_str();
  score->add_flag("--lenient", o.lenient, "Skip bad lines instead of failing");

  auto* diag = app.add_subcommand("diagnose", "Deviation clusters and checkpoint coverage");
  diag->add_option("--spec", o.spec, "Workflow JSON")->required();
  diag->add_option("--logs", o.logs, "Run log(s)")->required();
  diag->add_option("--scenario", o.scenarios, "Restrict to scenario (repeatable)");
  diag->add_option("--out", o.out, "Output markdown")->required();
  diag->add_flag("--lenient", o.lenient, "Skip bad lines instead of failing");

  auto* delta = app.add_subcommand("report-delta", "Baseline vs ours delta table");
  delta->add_option("--baseline", o.baseline, "Baseline CSV")->required();
  delta->add_option("--ours", o.ours, "Our CSV (e.g. from score)")->required();
  delta->add_option("--out", o.out, "Output table")->required();
  delta->add_option("--format", o.format, "csv or md (default: from --out)")->check(formats);
  delta->add_option("--metric", o.metric, "Metric column stem")->capture_default_str();
  delta->add_option("--decimals", o.decimals, "Displayed decimals")
      ->check(CLI::Range(0, 6))
      ->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "trajfid: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*sim) return cmd_simulate(o, err);
    if (*score) return cmd_score(o, err);
    if (*diag) return cmd_diagnose(o, err);
    return cmd_report_delta(o, err);
  } catch (const ValidationError& e) {
    err << "trajfid: error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "trajfid: parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "trajfid: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "trajfid: error: " << e.what() << '\n';
    return kExitIo;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace trajfid
