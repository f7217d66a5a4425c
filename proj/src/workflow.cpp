#include "trajfid/workflow.hpp"

#include <algorithm>

namespace trajfid {

const Scenario* WorkflowSpec::find_scenario(std::string_view id) const {
  auto it = std::find_if(scenarios.begin(), scenarios.end(),
                         [&](const Scenario& s) { return s.id == id; });
  return it == scenarios.end() ? nullptr : &*it;
}

bool WorkflowSpec::has_agent(const AgentId& a) const {
  return std::find(agents.begin(), agents.end(), a) != agents.end();
}

}  // namespace trajfid
