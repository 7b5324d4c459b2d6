#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ufls {

// A feeder section behind one sectionalizer.
struct LoadGroup {
  std::string id;
  std::string sectionalizer;
  std::optional<std::string> upstream;  // parent group; empty for the feeder head
  std::vector<std::string> members;     // device ids

  friend bool operator==(const LoadGroup&, const LoadGroup&) = default;
};

using SwitchStates = std::map<std::string, bool>;

// Radial chain of load groups. A normally-open tie switch may be listed but
// never forms a path.
class Topology {
 public:
  Topology() = default;
  // Throws ValidationError on duplicate ids, unknown upstreams, loops, or
  // devices listed in more than one group.
  Topology(std::vector<LoadGroup> groups, std::optional<std::string> tie_switch);

  const std::vector<LoadGroup>& groups() const { return groups_; }
  const std::optional<std::string>& tie_switch() const { return tie_switch_; }
  std::optional<std::size_t> group_index(const std::string& id) const;
  std::optional<std::size_t> sectionalizer_index(const std::string& switch_id) const;
  // Parent of each group by index; -1 at the head. Parents precede children.
  const std::vector<int>& parent() const { return parent_; }
  // Group indices in head-to-tail order.
  const std::vector<std::size_t>& order() const { return order_; }

  // Energized state per group from per-sectionalizer closed flags (indexed
  // like groups()).
  std::vector<bool> energized(const std::vector<bool>& closed) const;

 private:
  std::vector<LoadGroup> groups_;
  std::optional<std::string> tie_switch_;
  std::vector<int> parent_;
  std::vector<std::size_t> order_;
};

// Devices reachable from the BESS through closed sectionalizers. switch_states
// must name every sectionalizer; the tie switch may appear and is ignored.
// Throws LookupError on unknown or missing switch ids.
std::set<std::string> connected_devices(const Topology& topology, const SwitchStates& switch_states);

}  // namespace ufls
