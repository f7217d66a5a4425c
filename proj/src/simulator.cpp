#include "trajfid/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <thread>

#include "trajfid/error.hpp"

namespace trajfid {

namespace {

const SimBlock& sim_block(const WorkflowSpec& spec) {
  static const SimBlock no_roles{};
  return spec.sim ? *spec.sim : no_roles;
}

// Index of the entry agent inside the first supervisor -> entry -> supervisor
// round trip. Presence is checked when the sim block is parsed.
std::size_t confirmation_index(const std::vector<AgentId>& path, const AgentId& entry,
                               const AgentId& supervisor) {
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    if (path[i] == entry && path[i - 1] == supervisor && path[i + 1] == supervisor) return i;
  }
  throw ValidationError("payment trajectory has no confirmation round trip");
}

std::optional<std::size_t> hop_index(const std::vector<AgentId>& path, const AgentId& from,
                                     const AgentId& to) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (path[i] == from && path[i + 1] == to) return i;
  }
  return std::nullopt;
}

void validate_profile(const ModelProfile& p) {
  for (double v : {p.shortcut_prob, p.misroute_prob, p.redundant_prob, p.info_error_prob}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("profile '" + p.name + "': probabilities must lie in [0, 1]");
    }
  }
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

PaymentRoute route_pay_supervisor(const WorldState& world, bool guards_enabled,
                                  double misroute_prob, const WorkflowSpec& spec, Rng& rng) {
  const SimBlock& sim = sim_block(spec);
  if (!sim.payment_supervisor || !sim.review_agent) {
    throw ValidationError("workflow has no payment roles configured");
  }
  if (guards_enabled && world.cart_items.empty()) {
    return PaymentRoute{sim.entry_agent, true, false};
  }
  if (!rng.bernoulli(misroute_prob)) return PaymentRoute{*sim.review_agent, false, false};

  std::vector<AgentId> wrong;
  for (const auto& a : spec.agents) {
    if (a != *sim.payment_supervisor && a != *sim.review_agent) wrong.push_back(a);
  }
  if (wrong.empty()) return PaymentRoute{sim.entry_agent, false, true};
  return PaymentRoute{wrong[rng.uniform_index(wrong.size())], false, true};
}

bool matches_card_view(std::string_view intent_text, std::span<const std::string> keywords) {
  std::string text(intent_text);
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::any_of(keywords.begin(), keywords.end(), [&](const std::string& kw) {
    return text.find(kw) != std::string::npos;
  });
}

CardRoute route_card_intent(std::string_view intent_text, CardPath nominal, bool guards_enabled,
                            double misroute_prob, std::span<const std::string> keywords,
                            Rng& rng) {
  if (guards_enabled && matches_card_view(intent_text, keywords)) {
    return CardRoute{CardPath::retrieval, true, false};
  }
  if (rng.bernoulli(misroute_prob)) {
    const auto other =
        nominal == CardPath::registration ? CardPath::retrieval : CardPath::registration;
    return CardRoute{other, false, true};
  }
  return CardRoute{nominal, false, false};
}

WorldState make_world(const WorkflowSpec& spec, const Scenario& scenario,
                      std::uint64_t run_index, Rng& rng) {
  const SimBlock& sim = sim_block(spec);
  WorldState world;
  world.saved_cards = {"card-0001"};
  if (auto it = sim.intents.find(scenario.id); it != sim.intents.end()) {
    world.intent_text = it->second[run_index % it->second.size()];
  } else {
    world.intent_text = scenario.description;
  }
  if (sim.payment_scenario == scenario.id) {
    if (!rng.bernoulli(sim.empty_cart_prob)) world.cart_items = {"item-1", "item-2"};
  } else {
    world.cart_items = {"item-1", "item-2"};
  }
  return world;
}

RunRecord simulate_run(const WorkflowSpec& spec, const ModelProfile& profile,
                       const Scenario& scenario, const WorldState& world, Rng& rng) {
  const SimBlock& sim = sim_block(spec);
  std::vector<AgentId> path = scenario.expected.steps();
  bool success = true;
  std::vector<std::string> faults;

  if (sim.payment_scenario == scenario.id) {
    const AgentId& sup = *sim.payment_supervisor;
    const std::size_t c = confirmation_index(path, sim.entry_agent, sup);
    const bool shortcut = rng.bernoulli(profile.shortcut_prob);
    const bool redundant = rng.bernoulli(profile.redundant_prob);
    if (shortcut) {
      path.erase(path.begin() + static_cast<std::ptrdiff_t>(c),
                 path.begin() + static_cast<std::ptrdiff_t>(c + 2));
      faults.emplace_back("shortcut");
    } else if (redundant) {
      const AgentId entry = path[c];
      const AgentId back = path[c + 1];
      path.insert(path.begin() + static_cast<std::ptrdiff_t>(c + 2), {entry, back});
      faults.emplace_back("redundant");
    }

    if (auto i = hop_index(path, sup, *sim.review_agent)) {
      const auto route =
          route_pay_supervisor(world, profile.guards_enabled, profile.misroute_prob, spec, rng);
      if (route.suppressed || route.misrouted) {
        path.erase(path.begin() + static_cast<std::ptrdiff_t>(*i + 1), path.end());
        path.push_back(route.next);
        if (route.next != sim.entry_agent) path.push_back(sim.entry_agent);
        success = false;
        faults.emplace_back(route.suppressed ? "cart_guard" : "misroute");
      } else if (world.cart_items.empty()) {
        // Guard off: the review path runs on an empty cart.
        success = false;
        faults.emplace_back("empty_cart");
      }
    }
  } else if (sim.registration_scenario == scenario.id || sim.retrieval_scenario == scenario.id) {
    const CardPath nominal = sim.registration_scenario == scenario.id ? CardPath::registration
                                                                      : CardPath::retrieval;
    const auto route = route_card_intent(world.intent_text, nominal, profile.guards_enabled,
                                         profile.misroute_prob, sim.card_view_keywords, rng);
    if (route.path != nominal) {
      const auto& taken = route.path == CardPath::registration ? *sim.registration_scenario
                                                               : *sim.retrieval_scenario;
      path = spec.find_scenario(taken)->expected.steps();
      success = false;
      faults.emplace_back(route.misrouted ? "misroute" : "card_view_override");
    }
  }

  if (rng.bernoulli(profile.info_error_prob)) {
    if (success) faults.emplace_back("info_error");
    success = false;
  }

  std::map<std::string, std::string> meta;
  if (!world.intent_text.empty()) meta["intent"] = world.intent_text;
  if (!faults.empty()) meta["faults"] = join(faults, ',');
  if (sim.payment_scenario == scenario.id) {
    meta["cart_items"] = std::to_string(world.cart_items.size());
  }

  return RunRecord{.run_id = "",
                   .model = profile.name,
                   .scenario = scenario.id,
                   .repeat = 0,
                   .trajectory = Trajectory(std::move(path)),
                   .success = success,
                   .meta = meta.empty() ? std::nullopt : std::optional(std::move(meta))};
}

std::vector<RunRecord> simulate_corpus(const WorkflowSpec& spec,
                                       std::span<const ModelProfile> profiles,
                                       const SimConfig& config, unsigned threads) {
  if (config.runs_per_scenario < 1) throw ValidationError("runs_per_scenario must be >= 1");
  if (config.repeats < 1) throw ValidationError("repeats must be >= 1");
  for (const auto& p : profiles) validate_profile(p);

  std::vector<const Scenario*> scenarios;
  if (config.scenarios.empty()) {
    for (const auto& s : spec.scenarios) scenarios.push_back(&s);
  } else {
    for (const auto& id : config.scenarios) {
      const Scenario* s = spec.find_scenario(id);
      if (!s) throw ValidationError("unknown scenario '" + id + "'");
      scenarios.push_back(s);
    }
  }

  // Role checks up front: worker threads must not throw.
  const SimBlock& sim = sim_block(spec);
  for (const Scenario* s : scenarios) {
    if (sim.payment_scenario == s->id) {
      confirmation_index(s->expected.steps(), sim.entry_agent, *sim.payment_supervisor);
    }
    if (sim.registration_scenario == s->id || sim.retrieval_scenario == s->id) {
      if (!spec.find_scenario(*sim.registration_scenario) ||
          !spec.find_scenario(*sim.retrieval_scenario)) {
        throw ValidationError("card scenarios are not defined in the workflow");
      }
    }
  }

  const std::uint64_t runs = config.runs_per_scenario;
  const std::uint64_t per_scenario = runs * config.repeats;
  const std::uint64_t per_profile = per_scenario * scenarios.size();
  const std::uint64_t total = per_profile * profiles.size();

  std::vector<std::optional<RunRecord>> slots(total);
  auto simulate_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t o = begin; o < end; ++o) {
      const auto& profile = profiles[o / per_profile];
      const Scenario& scenario = *scenarios[(o % per_profile) / per_scenario];
      const std::uint64_t repeat = (o % per_scenario) / runs;
      const std::uint64_t run = o % runs;

      Rng rng(config.seed + o * kGoldenGamma);
      const WorldState world = make_world(spec, scenario, run, rng);
      RunRecord record = simulate_run(spec, profile, scenario, world, rng);
      record.run_id = "run-" + std::to_string(o);
      record.repeat = repeat;
      slots[o] = std::move(record);
    }
  };

  threads = std::max(1U, threads);
  if (threads == 1 || total < 2) {
    simulate_range(0, total);
  } else {
    std::vector<std::jthread> workers;
    const std::uint64_t chunk = (total + threads - 1) / threads;
    for (std::uint64_t begin = 0; begin < total; begin += chunk) {
      workers.emplace_back(simulate_range, begin, std::min(total, begin + chunk));
    }
  }

  std::vector<RunRecord> out;
  out.reserve(total);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace trajfid
