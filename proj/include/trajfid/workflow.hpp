#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajfid/core.hpp"

namespace trajfid {

// One execution instance of one model on one scenario.
struct RunRecord {
  std::string run_id;
  std::string model;
  std::string scenario;
  std::uint64_t repeat = 0;
  Trajectory trajectory;
  bool success = false;
  std::optional<std::map<std::string, std::string>> meta;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Scenario {
  std::string id;
  Trajectory expected;
  std::string description;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Synthetic stand-in for one LLM: fault rates applied by the simulator.
struct ModelProfile {
  std::string name;
  double shortcut_prob = 0.0;    // skip the payment confirmation round trip
  double misroute_prob = 0.0;    // wrong next agent at a routing decision
  double redundant_prob = 0.0;   // repeat the confirmation round trip once
  double info_error_prob = 0.0;  // right path, wrong saved/retrieved data
  bool guards_enabled = true;

  friend bool operator==(const ModelProfile&, const ModelProfile&) = default;
};

// Simulator roles and knobs carried by the optional "sim" block of a
// workflow document. Scenario/agent references are validated on parse.
struct SimBlock {
  AgentId entry_agent{"CPA"};
  std::vector<std::string> card_view_keywords{"show", "view", "list", "saved"};
  double empty_cart_prob = 0.0;

  // Card domain: both set or both absent.
  std::optional<std::string> registration_scenario;
  std::optional<std::string> retrieval_scenario;

  // Payment domain: all three set or all absent.
  std::optional<std::string> payment_scenario;
  std::optional<AgentId> payment_supervisor;
  std::optional<AgentId> review_agent;

  // Synthetic user utterances per scenario, cycled by run index.
  std::map<std::string, std::vector<std::string>> intents;

  std::vector<ModelProfile> profiles;

  friend bool operator==(const SimBlock&, const SimBlock&) = default;
};

struct WorkflowSpec {
  std::vector<AgentId> agents;
  std::vector<Scenario> scenarios;  // document order
  std::optional<SimBlock> sim;

  const Scenario* find_scenario(std::string_view id) const;
  bool has_agent(const AgentId& a) const;

  friend bool operator==(const WorkflowSpec&, const WorkflowSpec&) = default;
};

// Raw JSON text of the shipped default workflow (data/default_workflow.json).
std::string_view default_workflow_json();

// Parsed and validated default workflow.
const WorkflowSpec& default_workflow();

}  // namespace trajfid
