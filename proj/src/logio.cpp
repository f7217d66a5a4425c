#include "trajfid/logio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trajfid/error.hpp"

namespace trajfid {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kFormatVersion = "1";

// Rejects duplicate object keys, which nlohmann/json would otherwise resolve
// silently to the last occurrence.
class DuplicateKeyGuard {
 public:
  bool operator()(int /*depth*/, ordered_json::parse_event_t event, ordered_json& parsed) {
    using E = ordered_json::parse_event_t;
    switch (event) {
      case E::object_start:
        keys_.emplace_back();
        break;
      case E::object_end:
        if (!keys_.empty()) keys_.pop_back();
        break;
      case E::key: {
        const auto& key = parsed.get_ref<const std::string&>();
        if (!keys_.empty() && !keys_.back().insert(key).second) {
          throw ValidationError("duplicate key '" + key + "'");
        }
        break;
      }
      default:
        break;
    }
    return true;
  }

 private:
  std::vector<std::set<std::string>> keys_;
};

ordered_json parse_json(std::string_view text) {
  DuplicateKeyGuard guard;
  try {
    return ordered_json::parse(text.begin(), text.end(), std::ref(guard));
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ValidationError((path.empty() ? std::string("/") : path) + ": " + what);
}

void require_keys(const ordered_json& obj, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(child(path, key), "unknown key");
    }
  }
}

const ordered_json& member(const ordered_json& obj, std::string_view key,
                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(child(path, key), "missing required field");
  return *it;
}

const ordered_json& as_object(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  return j;
}

const ordered_json& as_array(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

std::string as_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

double as_probability(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double p = j.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) schema_error(path, "probability must lie in [0, 1]");
  return p;
}

AgentId as_agent(const ordered_json& j, const std::string& path) {
  const auto name = as_string(j, path);
  if (!AgentId::is_valid(name)) {
    schema_error(path, "invalid agent id '" + name + "' (allowed: [A-Za-z0-9_-]+)");
  }
  return AgentId(name);
}

Trajectory as_trajectory(const ordered_json& j, const std::string& path) {
  as_array(j, path);
  if (j.empty()) schema_error(path, "trajectory must contain at least one agent");
  std::vector<AgentId> steps;
  steps.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) steps.push_back(as_agent(j[i], child(path, i)));
  return Trajectory(std::move(steps));
}

void check_version(const ordered_json& obj, const std::string& path) {
  auto it = obj.find("format_version");
  if (it == obj.end()) return;
  const auto v = as_string(*it, child(path, "format_version"));
  if (v != kFormatVersion) {
    schema_error(child(path, "format_version"), "unsupported format version '" + v + "'");
  }
}

// ---- run records ----------------------------------------------------------

RunRecord record_from_json(const ordered_json& j) {
  const std::string root;
  as_object(j, root);

  auto run_id = as_string(member(j, "run_id", root), "/run_id");
  if (run_id.empty()) schema_error("/run_id", "must be non-empty");
  auto model = as_string(member(j, "model", root), "/model");
  auto scenario = as_string(member(j, "scenario", root), "/scenario");

  const auto& repeat = member(j, "repeat", root);
  if (!repeat.is_number_unsigned()) schema_error("/repeat", "expected a non-negative integer");

  auto trajectory = as_trajectory(member(j, "trajectory", root), "/trajectory");

  const auto& success = member(j, "success", root);
  if (!success.is_boolean()) schema_error("/success", "expected a boolean");

  std::optional<std::map<std::string, std::string>> meta;
  if (auto it = j.find("meta"); it != j.end()) {
    as_object(*it, "/meta");
    meta.emplace();
    for (const auto& [k, v] : it->items()) (*meta)[k] = as_string(v, child("/meta", k));
  }

  return RunRecord{.run_id = std::move(run_id),
                   .model = std::move(model),
                   .scenario = std::move(scenario),
                   .repeat = repeat.get<std::uint64_t>(),
                   .trajectory = std::move(trajectory),
                   .success = success.get<bool>(),
                   .meta = std::move(meta)};
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// ---- profiles -------------------------------------------------------------

ModelProfile profile_from_json(const ordered_json& j, const std::string& path) {
  as_object(j, path);
  require_keys(j, path,
               {"name", "shortcut_prob", "misroute_prob", "redundant_prob", "info_error_prob",
                "guards_enabled"});
  ModelProfile p;
  p.name = as_string(member(j, "name", path), child(path, "name"));
  if (p.name.empty()) schema_error(child(path, "name"), "must be non-empty");
  auto prob = [&](std::string_view key, double& out) {
    if (auto it = j.find(key); it != j.end()) out = as_probability(*it, child(path, key));
  };
  prob("shortcut_prob", p.shortcut_prob);
  prob("misroute_prob", p.misroute_prob);
  prob("redundant_prob", p.redundant_prob);
  prob("info_error_prob", p.info_error_prob);
  if (auto it = j.find("guards_enabled"); it != j.end()) {
    if (!it->is_boolean()) schema_error(child(path, "guards_enabled"), "expected a boolean");
    p.guards_enabled = it->get<bool>();
  }
  return p;
}

std::vector<ModelProfile> profiles_from_json(const ordered_json& j, const std::string& path) {
  as_array(j, path);
  std::vector<ModelProfile> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto p = profile_from_json(j[i], child(path, i));
    if (!names.insert(p.name).second) {
      schema_error(child(child(path, i), "name"), "duplicate profile name '" + p.name + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

// ---- workflow spec --------------------------------------------------------

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const Scenario& scenario_ref(const WorkflowSpec& spec, const ordered_json& j,
                             const std::string& path) {
  const auto id = as_string(j, path);
  const Scenario* s = spec.find_scenario(id);
  if (!s) schema_error(path, "unknown scenario '" + id + "'");
  return *s;
}

AgentId roster_agent(const WorkflowSpec& spec, const ordered_json& j, const std::string& path) {
  auto a = as_agent(j, path);
  if (!spec.has_agent(a)) schema_error(path, "agent '" + a.str() + "' is not in the roster");
  return a;
}

bool has_confirmation_round_trip(const Trajectory& t, const AgentId& entry,
                                 const AgentId& supervisor) {
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (t[i] == entry && t[i - 1] == supervisor && t[i + 1] == supervisor) return true;
  }
  return false;
}

bool has_hop(const Trajectory& t, const AgentId& from, const AgentId& to) {
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] == from && t[i + 1] == to) return true;
  }
  return false;
}

SimBlock sim_from_json(const ordered_json& j, const WorkflowSpec& spec) {
  const std::string path = "/sim";
  as_object(j, path);
  require_keys(j, path,
               {"entry_agent", "card_view_keywords", "empty_cart_prob", "card", "payment",
                "intents", "profiles"});
  SimBlock sim;

  if (auto it = j.find("entry_agent"); it != j.end()) {
    sim.entry_agent = roster_agent(spec, *it, child(path, "entry_agent"));
  } else {
    sim.entry_agent = spec.scenarios.front().expected[0];
  }

  if (auto it = j.find("card_view_keywords"); it != j.end()) {
    const auto kpath = child(path, "card_view_keywords");
    as_array(*it, kpath);
    sim.card_view_keywords.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      auto kw = as_string((*it)[i], child(kpath, i));
      if (kw.empty()) schema_error(child(kpath, i), "keyword must be non-empty");
      sim.card_view_keywords.push_back(lower(std::move(kw)));
    }
  }

  if (auto it = j.find("empty_cart_prob"); it != j.end()) {
    sim.empty_cart_prob = as_probability(*it, child(path, "empty_cart_prob"));
  }

  if (auto it = j.find("card"); it != j.end()) {
    const auto cpath = child(path, "card");
    as_object(*it, cpath);
    require_keys(*it, cpath, {"registration", "retrieval"});
    const auto& reg = scenario_ref(spec, member(*it, "registration", cpath),
                                   child(cpath, "registration"));
    const auto& ret = scenario_ref(spec, member(*it, "retrieval", cpath),
                                   child(cpath, "retrieval"));
    if (reg.id == ret.id) schema_error(cpath, "registration and retrieval must differ");
    sim.registration_scenario = reg.id;
    sim.retrieval_scenario = ret.id;
  }

  if (auto it = j.find("payment"); it != j.end()) {
    const auto ppath = child(path, "payment");
    as_object(*it, ppath);
    require_keys(*it, ppath, {"scenario", "supervisor", "review_agent"});
    const auto& pay = scenario_ref(spec, member(*it, "scenario", ppath), child(ppath, "scenario"));
    auto sup = roster_agent(spec, member(*it, "supervisor", ppath), child(ppath, "supervisor"));
    auto rev =
        roster_agent(spec, member(*it, "review_agent", ppath), child(ppath, "review_agent"));
    if (!has_hop(pay.expected, sup, rev)) {
      schema_error(ppath, "expected trajectory of '" + pay.id + "' has no " + sup.str() +
                              " -> " + rev.str() + " hop");
    }
    if (!has_confirmation_round_trip(pay.expected, sim.entry_agent, sup)) {
      schema_error(ppath, "expected trajectory of '" + pay.id + "' has no " + sup.str() +
                              " -> " + sim.entry_agent.str() + " -> " + sup.str() +
                              " confirmation round trip");
    }
    sim.payment_scenario = pay.id;
    sim.payment_supervisor = std::move(sup);
    sim.review_agent = std::move(rev);
  }

  if (auto it = j.find("intents"); it != j.end()) {
    const auto ipath = child(path, "intents");
    as_object(*it, ipath);
    for (const auto& [id, list] : it->items()) {
      const auto spath = child(ipath, id);
      if (!spec.find_scenario(id)) schema_error(spath, "unknown scenario '" + id + "'");
      as_array(list, spath);
      if (list.empty()) schema_error(spath, "intent list must be non-empty");
      auto& out = sim.intents[id];
      for (std::size_t i = 0; i < list.size(); ++i) {
        out.push_back(as_string(list[i], child(spath, i)));
      }
    }
  }

  if (auto it = j.find("profiles"); it != j.end()) {
    sim.profiles = profiles_from_json(*it, child(path, "profiles"));
  }
  return sim;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

std::string LineError::describe() const {
  return "line " + std::to_string(line) + ": " + message;
}

RunLogReader::RunLogReader(std::istream& in, bool strict) : in_(in), strict_(strict) {}

std::optional<LogEntry> RunLogReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (is_blank(line)) continue;

    auto fail = [&](LineErrorKind kind, const std::string& message) {
      LineError err{line_no_, kind, message};
      if (strict_) {
        if (kind == LineErrorKind::syntax) throw ParseError(err.describe());
        throw ValidationError(err.describe());
      }
      errors_.push_back(std::move(err));
    };

    const bool first = !seen_content_;
    seen_content_ = true;
    ordered_json j;
    try {
      j = parse_json(line);
    } catch (const ParseError& e) {
      fail(LineErrorKind::syntax, e.what());
      continue;
    } catch (const ValidationError& e) {
      fail(LineErrorKind::schema, e.what());
      continue;
    }

    if (j.is_object() && j.size() == 1 && j.contains("format_version")) {
      if (!first) {
        fail(LineErrorKind::schema, "format_version guard must be the first record");
      } else if (!j["format_version"].is_string() || j["format_version"] != kFormatVersion) {
        fail(LineErrorKind::schema, "unsupported format_version (expected \"1\")");
      }
      continue;
    }

    try {
      RunRecord record = record_from_json(j);
      if (!run_ids_.insert(record.run_id).second) {
        fail(LineErrorKind::schema, "duplicate run_id '" + record.run_id + "'");
        continue;
      }
      return LogEntry{line_no_, std::move(record)};
    } catch (const ValidationError& e) {
      fail(LineErrorKind::schema, e.what());
    }
  }
  if (in_.bad()) throw IoError("read error after line " + std::to_string(line_no_));
  return std::nullopt;
}

RunLog parse_run_log(std::istream& in, bool strict) {
  RunLogReader reader(in, strict);
  RunLog log;
  while (auto entry = reader.next()) {
    log.lines.push_back(entry->line);
    log.records.push_back(std::move(entry->record));
  }
  log.errors = reader.errors();
  return log;
}

RunLog parse_run_log(std::string_view text, bool strict) {
  std::istringstream in{std::string(text)};
  return parse_run_log(in, strict);
}

RunLog read_run_log_file(const std::filesystem::path& path, bool strict) {
  auto in = open_input(path);
  return parse_run_log(in, strict);
}

std::string format_run_record(const RunRecord& record) {
  ordered_json j;
  j["run_id"] = record.run_id;
  j["model"] = record.model;
  j["scenario"] = record.scenario;
  j["repeat"] = record.repeat;
  auto& steps = j["trajectory"] = ordered_json::array();
  for (const auto& a : record.trajectory) steps.push_back(a.str());
  j["success"] = record.success;
  if (record.meta) {
    auto& meta = j["meta"] = ordered_json::object();
    for (const auto& [k, v] : *record.meta) meta[k] = v;
  }
  return j.dump() + "\n";
}

void write_run_log(std::span<const RunRecord> records, std::ostream& out, WriteOptions options) {
  if (options.version_header) out << "{\"format_version\":\"1\"}\n";
  for (const auto& r : records) out << format_run_record(r);
  out.flush();
  if (!out) throw IoError("failed to write run log");
}

void write_run_log_file(std::span<const RunRecord> records, const std::filesystem::path& path,
                        WriteOptions options) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_run_log(records, out, options);
}

WorkflowSpec parse_workflow_spec(std::string_view text) {
  const auto j = parse_json(text);
  const std::string root;
  as_object(j, root);
  require_keys(j, root, {"format_version", "agents", "scenarios", "sim"});
  check_version(j, root);

  WorkflowSpec spec;
  const auto& agents = as_array(member(j, "agents", root), "/agents");
  if (agents.empty()) schema_error("/agents", "roster must be non-empty");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    auto a = as_agent(agents[i], child("/agents", i));
    if (spec.has_agent(a)) schema_error(child("/agents", i), "duplicate agent '" + a.str() + "'");
    spec.agents.push_back(std::move(a));
  }

  const auto& scenarios = as_object(member(j, "scenarios", root), "/scenarios");
  if (scenarios.empty()) schema_error("/scenarios", "at least one scenario is required");
  for (const auto& [id, body] : scenarios.items()) {
    const auto spath = child("/scenarios", id);
    if (!AgentId::is_valid(id)) schema_error(spath, "scenario id must match [A-Za-z0-9_-]+");
    as_object(body, spath);
    require_keys(body, spath, {"expected", "description"});
    const auto epath = child(spath, "expected");
    auto expected = as_trajectory(member(body, "expected", spath), epath);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (!spec.has_agent(expected[i])) {
        schema_error(child(epath, i), "unknown agent '" + expected[i].str() + "' (not in roster)");
      }
    }
    std::string description;
    if (auto it = body.find("description"); it != body.end()) {
      description = as_string(*it, child(spath, "description"));
    }
    spec.scenarios.push_back(Scenario{id, std::move(expected), std::move(description)});
  }

  if (auto it = j.find("sim"); it != j.end()) spec.sim = sim_from_json(*it, spec);
  return spec;
}

WorkflowSpec read_workflow_spec_file(const std::filesystem::path& path) {
  return parse_workflow_spec(read_text_file(path));
}

std::vector<ModelProfile> parse_profiles(std::string_view text) {
  const auto j = parse_json(text);
  if (j.is_array()) return profiles_from_json(j, "");
  as_object(j, "");
  require_keys(j, "", {"format_version", "profiles"});
  check_version(j, "");
  return profiles_from_json(member(j, "profiles", ""), "/profiles");
}

std::vector<ModelProfile> read_profiles_file(const std::filesystem::path& path) {
  return parse_profiles(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("failed to write '" + path.string() + "'");
}

}  // namespace trajfid
