#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "evrp/core.hpp"
#include "evrp/gen.hpp"
#include "evrp/schedule.hpp"

namespace evrp::test {

inline EventNode make_node(NodeKind kind, double a_min, double a_max, double duration = 0.0) {
  EventNode v;
  v.kind = kind;
  v.a_min = a_min;
  v.a_max = a_max;
  v.duration = duration;
  return v;
}

inline EventNode fixed_node(double at, double duration, double slack = 0.0) {
  EventNode v = make_node(NodeKind::fixed, at - slack, at + duration + slack, duration);
  v.fixed_arrival = at;
  return v;
}

inline EventNode with_charging(EventNode v, double walk, double max_gain) {
  ChargingOption c;
  c.walk_time = walk;
  c.rate = 1.0;
  c.max_gain = max_gain;
  v.charging = c;
  return v;
}

inline Matrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<int>(rows.size()));
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

// Symmetric matrix with every off-diagonal entry equal to `x`.
inline Matrix uniform_matrix(int n, double x) {
  Matrix m(n, x);
  for (int i = 0; i < n; ++i) m(i, i) = 0.0;
  return m;
}

inline Instance make_instance(std::vector<EventNode> nodes, Matrix dist, Matrix travel, double k_min, double k_max,
                              double k_start, Weights w = Weights::raw(1.0, 0.0, 0.0), double epsilon = 0.0) {
  Instance inst;
  for (size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].id = static_cast<NodeId>(i);
    if (nodes[i].kind == NodeKind::separator) inst.separators.push_back(static_cast<NodeId>(i));
  }
  inst.nodes = std::move(nodes);
  inst.dist = std::move(dist);
  inst.travel = std::move(travel);
  inst.k_min = k_min;
  inst.k_max = k_max;
  inst.k_start = k_start;
  inst.weights = w;
  inst.epsilon = epsilon;
  finalize(inst);
  return inst;
}

inline Instance generated(std::uint64_t seed, int events, int max_days = 2, std::array<double, 3> prefs = {0.5, 0.3, 0.2},
                          double epsilon = 1e-3) {
  GenConfig g;
  g.seed = seed;
  g.min_events = events;
  g.max_events = events;
  g.max_days = max_days;
  g.prefs = prefs;
  g.epsilon = epsilon;
  return generate(g);
}

inline std::string fixture(const std::string& name) { return std::string(EVRP_FIXTURE_DIR) + "/" + name; }

// Seed-42 six-event instance, weights (0.5, 0.3, 0.2), epsilon 0.01.
inline Instance seed42() { return load(fixture("seed42_six_events.json")); }

// Values derived with the brute-force reference in tests/python and frozen.
inline constexpr double kSeed42Optimum = 6.646068445281;
inline const Route kSeed42Order{0, 1, 4, 6, 5, 3, 2, 7, 8};

inline bool has_violation(const std::vector<Violation>& vs, ConstraintId id) {
  for (const auto& v : vs) {
    if (v.constraint == id) return true;
  }
  return false;
}

}  // namespace evrp::test
