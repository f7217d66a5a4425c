#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajfid {

// Name of one agent in a multi-agent workflow. Restricted to
// [A-Za-z0-9_-]+ so it can be written to JSONL and CSV without escaping.
class AgentId {
 public:
  // Throws ValidationError when `name` is empty or has a disallowed character.
  explicit AgentId(std::string name);

  static bool is_valid(std::string_view name) noexcept;

  const std::string& str() const noexcept { return name_; }

  friend auto operator<=>(const AgentId&, const AgentId&) = default;
  friend bool operator==(const AgentId&, const AgentId&) = default;

 private:
  std::string name_;
};

std::ostream& operator<<(std::ostream& os, const AgentId& id);

// Ordered sequence of agents that handled one task instance. Never empty;
// agents may repeat.
class Trajectory {
 public:
  explicit Trajectory(std::vector<AgentId> steps);
  Trajectory(std::initializer_list<std::string_view> names);

  // Convenience for tests and config: validates each name.
  static Trajectory from_names(std::span<const std::string> names);

  std::size_t size() const noexcept { return steps_.size(); }
  const AgentId& operator[](std::size_t i) const { return steps_[i]; }
  const std::vector<AgentId>& steps() const noexcept { return steps_; }
  auto begin() const noexcept { return steps_.begin(); }
  auto end() const noexcept { return steps_.end(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
  friend auto operator<=>(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<AgentId> steps_;
};

// "A -> B -> C"
std::string to_string(const Trajectory& t);

struct Transition {
  AgentId from;
  AgentId to;

  friend auto operator<=>(const Transition&, const Transition&) = default;
  friend bool operator==(const Transition&, const Transition&) = default;
};

std::string to_string(const Transition& t);

// Bag of transitions with multiplicity. Stored canonically: no zero counts,
// so two multisets are equal iff their count maps are equal.
class TransitionMultiset {
 public:
  using Counts = std::map<Transition, std::size_t>;

  TransitionMultiset() = default;
  TransitionMultiset(std::initializer_list<std::pair<const Transition, std::size_t>> entries);

  void add(const Transition& t, std::size_t n = 1);
  std::size_t count(const Transition& t) const;
  std::size_t total_size() const noexcept { return total_; }
  std::size_t distinct_size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }
  const Counts& counts() const noexcept { return counts_; }
  auto begin() const noexcept { return counts_.begin(); }
  auto end() const noexcept { return counts_.end(); }

  friend bool operator==(const TransitionMultiset& a, const TransitionMultiset& b) {
    return a.counts_ == b.counts_;
  }

 private:
  Counts counts_;
  std::size_t total_ = 0;
};

// "{(A,B):2, (B,C):1}"
std::string to_string(const TransitionMultiset& m);

TransitionMultiset transitions(const Trajectory& t);
// Per-transition min of counts.
TransitionMultiset intersect(const TransitionMultiset& a, const TransitionMultiset& b);
// Per-transition saturating difference max(0, a - b).
TransitionMultiset subtract(const TransitionMultiset& a, const TransitionMultiset& b);
std::size_t total_size(const TransitionMultiset& m);

}  // namespace trajfid
