#include "grid/topology.hpp"

#include "core/errors.hpp"

namespace ufls {

Topology::Topology(std::vector<LoadGroup> groups, std::optional<std::string> tie_switch)
    : groups_(std::move(groups)), tie_switch_(std::move(tie_switch)) {
  std::vector<std::string> issues;
  std::map<std::string, std::size_t> by_id;
  std::set<std::string> switches;
  std::set<std::string> devices;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const auto& g = groups_[i];
    if (!by_id.emplace(g.id, i).second) issues.push_back("duplicate load group id '" + g.id + "'");
    if (!switches.insert(g.sectionalizer).second) {
      issues.push_back("sectionalizer '" + g.sectionalizer + "' controls more than one group");
    }
    for (const auto& d : g.members) {
      if (!devices.insert(d).second) {
        issues.push_back("device '" + d + "' belongs to more than one load group");
      }
    }
  }
  if (tie_switch_ && switches.count(*tie_switch_)) {
    issues.push_back("tie switch '" + *tie_switch_ + "' is also a sectionalizer");
  }
  parent_.assign(groups_.size(), -1);
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const auto& up = groups_[i].upstream;
    if (!up) continue;
    auto it = by_id.find(*up);
    if (it == by_id.end()) {
      issues.push_back("group '" + groups_[i].id + "' has unknown upstream '" + *up + "'");
    } else {
      parent_[i] = static_cast<int>(it->second);
    }
  }
  // Depth-first ordering; anything left unvisited sits on a cycle.
  std::vector<int> state(groups_.size(), 0);
  std::vector<std::vector<std::size_t>> children(groups_.size());
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (parent_[i] < 0) {
      roots.push_back(i);
    } else {
      children[static_cast<std::size_t>(parent_[i])].push_back(i);
    }
  }
  std::vector<std::size_t> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const std::size_t g = stack.back();
    stack.pop_back();
    if (state[g]) continue;
    state[g] = 1;
    order_.push_back(g);
    for (auto it = children[g].rbegin(); it != children[g].rend(); ++it) stack.push_back(*it);
  }
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (!state[i]) issues.push_back("load group '" + groups_[i].id + "' is part of a loop");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::optional<std::size_t> Topology::group_index(const std::string& id) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Topology::sectionalizer_index(const std::string& switch_id) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].sectionalizer == switch_id) return i;
  }
  return std::nullopt;
}

std::vector<bool> Topology::energized(const std::vector<bool>& closed) const {
  std::vector<bool> on(groups_.size(), false);
  for (std::size_t g : order_) {
    const bool upstream_on = parent_[g] < 0 || on[static_cast<std::size_t>(parent_[g])];
    on[g] = upstream_on && closed[g];
  }
  return on;
}

std::set<std::string> connected_devices(const Topology& topology, const SwitchStates& switch_states) {
  std::vector<bool> closed(topology.groups().size(), false);
  std::vector<bool> seen(topology.groups().size(), false);
  for (const auto& [id, is_closed] : switch_states) {
    if (topology.tie_switch() && id == *topology.tie_switch()) continue;
    const auto idx = topology.sectionalizer_index(id);
    if (!idx) throw LookupError("unknown switch id '" + id + "'");
    closed[*idx] = is_closed;
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw LookupError("switch state missing for '" + topology.groups()[i].sectionalizer + "'");
    }
  }
  const auto on = topology.energized(closed);
  std::set<std::string> out;
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (!on[i]) continue;
    out.insert(topology.groups()[i].members.begin(), topology.groups()[i].members.end());
  }
  return out;
}

}  // namespace ufls
