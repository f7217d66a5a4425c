#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajfid/rng.hpp"
#include "trajfid/workflow.hpp"

namespace trajfid {

// Synthetic environment a run starts from.
struct WorldState {
  std::vector<std::string> cart_items;
  std::vector<std::string> saved_cards;
  std::string intent_text;
};

struct PaymentRoute {
  AgentId next;
  bool suppressed = false;  // cart guard fired: review path skipped, run fails
  bool misrouted = false;
};

// Review-dispatch decision of the payment supervisor. With guards on and an
// empty cart the review path is suppressed and control returns to the entry
// agent without touching `rng`. Otherwise one misroute draw is taken; on a hit
// a wrong agent is picked uniformly from the roster minus the supervisor and
// the review agent (one extra draw).
PaymentRoute route_pay_supervisor(const WorldState& world, bool guards_enabled,
                                  double misroute_prob, const WorkflowSpec& spec, Rng& rng);

enum class CardPath { registration, retrieval };

struct CardRoute {
  CardPath path;
  bool deterministic = false;  // keyword guard decided; no randomness used
  bool misrouted = false;
};

// True when `intent_text`, lowercased, contains any keyword as a substring.
bool matches_card_view(std::string_view intent_text, std::span<const std::string> keywords);

// Entry-agent dispatch of a card intent. `nominal` is the path the intent
// actually asks for. With guards on, a card-view keyword hit routes to
// retrieval with no draw; otherwise one misroute draw may flip the path.
CardRoute route_card_intent(std::string_view intent_text, CardPath nominal, bool guards_enabled,
                            double misroute_prob, std::span<const std::string> keywords,
                            Rng& rng);

// Initial world for run `run_index` of `scenario`. For the payment scenario
// one empty-cart draw is taken (before any fault draw); other scenarios use
// no randomness. The intent is picked round-robin from the sim block.
WorldState make_world(const WorkflowSpec& spec, const Scenario& scenario,
                      std::uint64_t run_index, Rng& rng);

// Simulates one run. Draw order:
//   payment scenario: shortcut, redundant, review-dispatch misroute
//                     (+ wrong-agent pick on a hit);
//   card scenarios:   card-intent misroute unless the keyword guard decides;
//   every scenario:   info_error last.
// The returned record has run_id empty and repeat 0; meta carries the intent
// and any faults that fired.
RunRecord simulate_run(const WorkflowSpec& spec, const ModelProfile& profile,
                       const Scenario& scenario, const WorldState& world, Rng& rng);

struct SimConfig {
  std::uint64_t seed = 0;
  std::uint64_t runs_per_scenario = 250;
  std::uint64_t repeats = 5;
  std::vector<std::string> scenarios;  // empty: every scenario of the spec
};

// Enumerates (profile, scenario, repeat, run) in that nesting order. Run
// ordinal o is seeded with seed + o * 0x9E3779B97F4A7C15 and gets run_id
// "run-<o>". Output is identical for any `threads` value.
std::vector<RunRecord> simulate_corpus(const WorkflowSpec& spec,
                                       std::span<const ModelProfile> profiles,
                                       const SimConfig& config, unsigned threads = 1);

}  // namespace trajfid
