#include "trajfid/core.hpp"

#include <algorithm>
#include <sstream>

#include "trajfid/error.hpp"

namespace trajfid {

namespace {

bool is_token_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

}  // namespace

AgentId::AgentId(std::string name) : name_(std::move(name)) {
  if (!is_valid(name_)) {
    throw ValidationError("invalid agent id '" + name_ +
                          "': must be non-empty and use only [A-Za-z0-9_-]");
  }
}

bool AgentId::is_valid(std::string_view name) noexcept {
  return !name.empty() && std::all_of(name.begin(), name.end(), is_token_char);
}

std::ostream& operator<<(std::ostream& os, const AgentId& id) { return os << id.str(); }

Trajectory::Trajectory(std::vector<AgentId> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw ValidationError("trajectory must contain at least one agent");
}

Trajectory::Trajectory(std::initializer_list<std::string_view> names)
    : Trajectory([&] {
        std::vector<AgentId> steps;
        steps.reserve(names.size());
        for (auto n : names) steps.emplace_back(std::string(n));
        return steps;
      }()) {}

Trajectory Trajectory::from_names(std::span<const std::string> names) {
  std::vector<AgentId> steps;
  steps.reserve(names.size());
  for (const auto& n : names) steps.emplace_back(n);
  return Trajectory(std::move(steps));
}

std::string to_string(const Trajectory& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += " -> ";
    out += t[i].str();
  }
  return out;
}

std::string to_string(const Transition& t) {
  return "(" + t.from.str() + "," + t.to.str() + ")";
}

TransitionMultiset::TransitionMultiset(
    std::initializer_list<std::pair<const Transition, std::size_t>> entries) {
  for (const auto& [t, n] : entries) add(t, n);
}

void TransitionMultiset::add(const Transition& t, std::size_t n) {
  if (n == 0) return;
  counts_[t] += n;
  total_ += n;
}

std::size_t TransitionMultiset::count(const Transition& t) const {
  auto it = counts_.find(t);
  return it == counts_.end() ? 0 : it->second;
}

std::string to_string(const TransitionMultiset& m) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [t, n] : m) {
    if (!first) os << ", ";
    first = false;
    os << to_string(t) << ':' << n;
  }
  os << '}';
  return os.str();
}

TransitionMultiset transitions(const Trajectory& t) {
  TransitionMultiset out;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) out.add(Transition{t[i], t[i + 1]});
  return out;
}

TransitionMultiset intersect(const TransitionMultiset& a, const TransitionMultiset& b) {
  // Walk both sorted maps in lockstep.
  TransitionMultiset out;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      out.add(ia->first, std::min(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  return out;
}

TransitionMultiset subtract(const TransitionMultiset& a, const TransitionMultiset& b) {
  TransitionMultiset out;
  for (const auto& [t, n] : a) {
    const std::size_t m = b.count(t);
    if (n > m) out.add(t, n - m);
  }
  return out;
}

std::size_t total_size(const TransitionMultiset& m) { return m.total_size(); }

}  // namespace trajfid
