#pragma once

// One deliberate mutation per constraint family. Each corrupted copy must
// make the validator report the family it targets.

#include <optional>
#include <utility>
#include <vector>

#include "evrp/core.hpp"

namespace evrp::test {

struct Corruption {
  ConstraintId target;
  Schedule schedule;
};

inline std::optional<NodeId> first_of_kind(const Schedule& s, const Instance& inst, NodeKind kind) {
  for (NodeId u : s.order) {
    if (inst.node(u).kind == kind) return u;
  }
  return std::nullopt;
}

// Families whose trigger node is missing from the instance are skipped.
inline std::vector<Corruption> corruptions(const Schedule& s, const Instance& inst) {
  std::vector<Corruption> out;
  const int n = inst.size();
  const auto at = [](NodeId u) { return static_cast<size_t>(u); };
  auto add = [&](ConstraintId id, auto&& mutate) {
    Schedule c = s;
    mutate(c);
    out.push_back({id, std::move(c)});
  };

  if (n >= 4) {
    add(ConstraintId::flow, [&](Schedule& c) { c.order[2] = c.order[1]; });
    add(ConstraintId::self_cycle, [&](Schedule& c) { c.order[2] = c.order[1]; });
    add(ConstraintId::two_cycle, [&](Schedule& c) { c.order[3] = c.order[1]; });
  }
  if (auto f = first_of_kind(s, inst, NodeKind::fixed)) {
    add(ConstraintId::fixed_arrival, [&](Schedule& c) { c.arrival[at(*f)] += 1.0; });
  }
  if (auto f = first_of_kind(s, inst, NodeKind::flexible)) {
    add(ConstraintId::window, [&](Schedule& c) {
      const auto& node = inst.node(*f);
      c.arrival[at(*f)] = node.a_max - node.duration + 10.0;
    });
  }
  if (auto sep = first_of_kind(s, inst, NodeKind::separator)) {
    add(ConstraintId::separator_window, [&](Schedule& c) {
      const auto& node = inst.node(*sep);
      c.arrival[at(*sep)] = node.a_max - node.duration + 10.0;
    });
  }
  add(ConstraintId::time_chain, [&](Schedule& c) {
    // Arrive at the second stop at the same moment as at the first.
    c.arrival[at(c.order[1])] = c.arrival[at(c.order[0])];
  });
  add(ConstraintId::end_node_charge, [&](Schedule& c) { c.charge[at(n - 1)] = 1; });
  add(ConstraintId::min_range, [&](Schedule& c) {
    for (auto& k : c.range) k = inst.k_min - 1.0;
  });
  add(ConstraintId::gain_cap, [&](Schedule& c) {
    const NodeId u = c.order[1];
    const double cap = c.charge[at(u)] ? inst.node(u).max_gain() : 0.0;
    c.gain[at(u)] = cap + 1.0;
  });
  add(ConstraintId::max_range, [&](Schedule& c) {
    const NodeId u = c.order[1];
    c.range[at(u)] = inst.k_max;
    c.gain[at(u)] += 1.0;
  });
  add(ConstraintId::range_chain, [&](Schedule& c) { c.range[at(c.order[1])] += 5.0; });
  add(ConstraintId::domain, [&](Schedule& c) { c.arrival[at(c.order[1])] = -1.0; });
  return out;
}

}  // namespace evrp::test
