#pragma once

// From a visit order to a complete schedule: time and range propagation,
// the greedy charging planner and the best-fit-decreasing construction.
//
// A route is a sequence of node ids that starts at node 0 and ends at node
// n-1. Routes may be partial (skip some nodes) while a solution is under
// construction; a Schedule always covers every node.

#include <cstdint>
#include <optional>
#include <vector>

#include "evrp/core.hpp"

namespace evrp {

using Route = std::vector<NodeId>;
using ChargeFlags = std::vector<std::uint8_t>;  // r_u, indexed by node id

inline constexpr double kWalkPenalty = 0.1;         // minutes, ranking denominator offset
inline constexpr double kExtraChargeShare = 0.10;   // share of kMax that justifies an extra stop
inline constexpr int kMinStopSearchBudget = 4096;   // subset evaluations

struct TimedOrder {
  Route order;
  std::vector<double> arrival;  // per node id, 0 for nodes not on the route
  bool feasible_times = false;
  NodeId first_violation = -1;
};

// Arrival times along `route` for charge flags `charge`. Every node gets
// its earliest arrival given the start time; the start time itself is
// the one minimizing the time terms of the objective (it is pushed later
// while that shortens the first day without delaying the first separator).
TimedOrder propagate_times(const Route& route, const ChargeFlags& charge, const Instance& inst,
                           const Weights& w);

struct RangeProfile {
  std::vector<double> range;  // on arrival, per node id
  std::vector<double> gain;   // effective gain, per node id
  int deficit_pos = -1;       // first route position below kMin, -1 if none
  NodeId deficit_node = -1;

  bool feasible() const { return deficit_pos < 0; }
};

// Ranges with every flagged node charging as much as it can.
RangeProfile propagate_ranges(const Route& route, const ChargeFlags& charge, const Instance& inst);

// Ranges for explicit gain requests; each request is capped at the headroom
// kMax - k_u when it is applied.
RangeProfile propagate_ranges(const Route& route, const ChargeFlags& charge, const std::vector<double>& requested,
                              const Instance& inst);

// Objective value of a (possibly partial) route.
double route_objective(const Route& route, const std::vector<double>& arrival, const ChargeFlags& charge,
                       const std::vector<double>& range, const Instance& inst, const Weights& w);

// Priority of a charging candidate: gain per minute of walking.
inline double charging_priority(double gain, double walk_time) { return gain / (2.0 * walk_time + kWalkPenalty); }

struct ChargePlan {
  ChargeFlags charge;
  std::vector<double> gain;
};

struct PlannerStats {
  int greedy_stops = 0;        // stops after the greedy repair phase
  bool refined = false;        // the minimum-stop search changed the plan
};

std::optional<ChargePlan> plan_charging(const Route& route, const Instance& inst, const Weights& w,
                                        PlannerStats* stats = nullptr);

struct RouteEval {
  TimedOrder times;
  RangeProfile ranges;
  ChargeFlags charge;
  double objective = 0.0;
};

// Charging plan plus times, ranges and objective; nullopt if infeasible.
std::optional<RouteEval> evaluate_route(const Route& route, const Instance& inst, const Weights& w);

// Times, ranges and objective for a given set of charge flags.
std::optional<RouteEval> evaluate_with_charges(const Route& route, const ChargeFlags& charge, const Instance& inst,
                                               const Weights& w);

Schedule to_schedule(const RouteEval& e, const Instance& inst);

// Full schedule for a permutation of all nodes; nullopt if infeasible.
// Throws Error(invalid_argument) if `order` is not such a permutation.
std::optional<Schedule> assemble_schedule(const Route& order, const Instance& inst, const Weights& w);

// True if `route` keeps the chain nodes (start, fixed events, separators,
// end) in index order.
bool respects_chain(const Route& route, const Instance& inst);

// Best-fit-decreasing initial schedule. Throws Error(no_initial_solution).
Schedule bfd_initial(const Instance& inst, const Weights& w);

// Time budget left in the gap closing at route position `closing_pos`:
// the latest admissible arrival there minus the earliest possible arrival.
double gap_slack(const Route& route, const TimedOrder& times, const ChargeFlags& charge, size_t closing_pos,
                 const Instance& inst);

// Incremental earliest-time check for growing a route one node at a time
// with no charging. Used to prune partial orders: adding stops only
// delays arrivals, so a prefix that fails here fails for every charge set.
class ForwardClock {
 public:
  explicit ForwardClock(const Instance& inst);

  NodeId last() const { return stack_.back().node; }
  size_t depth() const { return stack_.size(); }
  double arrival(size_t pos) const { return stack_[pos].arrival; }
  double last_arrival() const { return stack_.back().arrival; }
  bool start_feasible() const { return start_ok_; }

  // Arrival at `v` if appended now, or nullopt if a window is violated.
  std::optional<double> try_visit(NodeId v) const { return try_visit_after(last(), last_arrival(), v); }

  // Arrival at `v` right after leaving `u`, which was reached at `arrival`.
  std::optional<double> try_visit_after(NodeId u, double arrival, NodeId v) const {
    return arrive(u, arrival, v, inst_->travel(u, v));
  }

  // Whether `v` can still be reached in time by any path after leaving `u`.
  bool reachable_after(NodeId u, double arrival, NodeId v) const {
    return arrive(u, arrival, v, inst_->shortest_travel(u, v)).has_value();
  }

  // True if, after reaching `v` at `arrival`, some flexible node with
  // used[f] == 0 can no longer be reached in time.
  bool strands_free(NodeId v, double arrival, const std::vector<char>& used) const;

  void push(NodeId v, double arrival) { stack_.push_back({v, arrival}); }
  void pop() { stack_.pop_back(); }

 private:
  std::optional<double> arrive(NodeId u, double arrival, NodeId v, double travel) const;

  struct Entry {
    NodeId node;
    double arrival;
  };
  const Instance* inst_;
  std::vector<Entry> stack_;
  double a0_ref_ = 0.0;
  bool start_ok_ = true;
};

}  // namespace evrp
