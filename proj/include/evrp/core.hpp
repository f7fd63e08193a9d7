#pragma once

// Domain types of the multi-day EV routing model, objective evaluation and
// the constraint validator.
//
// Units: times are minutes since the instance epoch, distances and battery
// ranges are kilometers of driving range.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evrp/error.hpp"

namespace evrp {

using NodeId = int;

inline constexpr double kTimeTol = 1e-6;
inline constexpr double kRangeTol = 1e-6;
inline constexpr double kWeightDelta = 1e-9;

enum class NodeKind { start, fixed, flexible, separator, end };

const char* to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

struct StationCandidate {
  double power_kw = 0.0;
  double walk_meters = 0.0;
  int plug_count = 0;
  bool compatible = true;

  bool operator==(const StationCandidate&) const = default;
};

struct ChargingOption {
  double walk_time = 0.0;  // one way, minutes
  double rate = 0.0;       // range-km per minute of dwell
  double max_gain = 0.0;   // range-km
  StationCandidate station;
  std::vector<StationCandidate> alternates;  // metadata only

  bool operator==(const ChargingOption&) const = default;
};

struct EventNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::flexible;
  std::optional<double> fixed_arrival;
  double a_min = 0.0;
  double a_max = 0.0;
  double duration = 0.0;
  std::optional<ChargingOption> charging;
  double x = 0.0;  // coordinates, metadata
  double y = 0.0;

  bool chargeable() const { return charging.has_value(); }
  double walk_time() const { return charging ? charging->walk_time : 0.0; }
  double max_gain() const { return charging ? charging->max_gain : 0.0; }

  bool operator==(const EventNode&) const = default;
};

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n, double fill = 0.0) : n_(n), data_(static_cast<size_t>(n) * n, fill) {}

  int size() const { return n_; }
  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * n_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * n_ + c]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

struct SummandBounds {
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const SummandBounds&) const = default;
};

enum Summand { kDistance = 0, kTime = 1, kCharge = 2 };

struct Weights {
  double wd = 1.0;
  double wt = 0.0;
  double wc = 0.0;
  std::array<double, 3> prefs{1.0, 0.0, 0.0};
  std::array<SummandBounds, 3> bounds{};

  // Raw weights equal to the preferences, no normalization.
  static Weights raw(double wd, double wt, double wc);

  bool operator==(const Weights&) const = default;
};

struct Instance {
  std::vector<EventNode> nodes;
  Matrix dist;    // km
  Matrix travel;  // minutes
  double k_min = 0.0;
  double k_max = 0.0;
  double k_start = 0.0;
  std::vector<NodeId> separators;
  Weights weights;
  double epsilon = 1e-3;

  // Derived data, rebuilt by finalize().
  std::vector<NodeId> chain;          // start, fixed events, separators, end in index order
  std::vector<NodeId> free_nodes;     // flexible events
  std::vector<int> separator_pos;     // position in `separators`, -1 otherwise
  Matrix shortest_travel;             // all-pairs shortest travel times

  int size() const { return static_cast<int>(nodes.size()); }
  NodeId end_node() const { return size() - 1; }
  const EventNode& node(NodeId u) const { return nodes[static_cast<size_t>(u)]; }

  // Number of appointments: nodes that are neither start, end nor separator.
  int event_count() const;

  bool operator==(const Instance& o) const {
    return nodes == o.nodes && dist == o.dist && travel == o.travel && k_min == o.k_min &&
           k_max == o.k_max && k_start == o.k_start && separators == o.separators &&
           weights == o.weights && epsilon == o.epsilon;
  }
};

// Checks every Instance invariant and rebuilds the derived data.
// Throws Error(invalid_argument) with the first broken invariant.
void finalize(Instance& inst);

struct Schedule {
  std::vector<NodeId> order;
  std::vector<double> arrival;         // per node id
  std::vector<std::uint8_t> charge;    // r_u per node id
  std::vector<double> gain;            // actual charge gain per node id
  std::vector<double> range;           // battery range on arrival per node id
  double objective = 0.0;

  int stop_count() const;
};

enum class ConstraintId {
  flow,
  self_cycle,
  two_cycle,
  fixed_arrival,
  window,
  separator_window,
  time_chain,
  end_node_charge,
  min_range,
  gain_cap,
  max_range,
  range_chain,
  domain,
};

const char* to_string(ConstraintId id);

struct Violation {
  ConstraintId constraint;
  std::string location;
  std::string detail;
  double magnitude = 0.0;
};

// Value of the reference time s(u) of separator `u`: the start time for the
// first separator, otherwise the latest departure of the previous separator.
double separator_ref(NodeId u, const std::vector<double>& arrival, const Instance& inst);

// Objective value of a structurally valid schedule.
double evaluate_objective(const Schedule& s, const Instance& inst, const Weights& w);
double evaluate_objective(const Schedule& s, const Instance& inst);

// All constraint violations of `s`; empty iff the schedule is feasible.
std::vector<Violation> validate(const Schedule& s, const Instance& inst);

// Sum over nodes with an outgoing edge of their cheapest outgoing edge.
double min_edge_sum(const Matrix& m);

// Normalized weights from user preferences. The upper bounds come from the
// best-fit-decreasing construction, the lower bounds from the cheapest edge
// of every node. Throws Error(no_initial_solution) if no initial solution
// can be built.
Weights normalize_weights(const Instance& inst, std::array<double, 3> prefs);

// Weights from preferences and explicitly given summand bounds.
Weights weights_from_bounds(std::array<double, 3> prefs, const std::array<SummandBounds, 3>& bounds);

// Lower bound on the objective value of any feasible schedule.
double objective_lower_bound(const Instance& inst, const Weights& w);

}  // namespace evrp
