#include "evrp/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace evrp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalidArgument";
    case ErrorCode::dimension_mismatch: return "dimensionMismatch";
    case ErrorCode::no_initial_solution: return "noInitialSolution";
    case ErrorCode::generation_failed: return "generationFailed";
    case ErrorCode::parse_error: return "parseError";
    case ErrorCode::unsupported_version: return "unsupportedVersion";
    case ErrorCode::too_large: return "tooLarge";
    case ErrorCode::no_solution_found: return "noSolutionFound";
    case ErrorCode::io_error: return "ioError";
  }
  return "unknown";
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::start: return "start";
    case NodeKind::fixed: return "fixed";
    case NodeKind::flexible: return "flexible";
    case NodeKind::separator: return "separator";
    case NodeKind::end: return "end";
  }
  return "unknown";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "start") return NodeKind::start;
  if (s == "fixed") return NodeKind::fixed;
  if (s == "flexible") return NodeKind::flexible;
  if (s == "separator") return NodeKind::separator;
  if (s == "end") return NodeKind::end;
  throw Error(ErrorCode::invalid_argument, "unknown node kind '" + s + "'");
}

const char* to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::flow: return "flow";
    case ConstraintId::self_cycle: return "selfCycle";
    case ConstraintId::two_cycle: return "twoCycle";
    case ConstraintId::fixed_arrival: return "fixedArrival";
    case ConstraintId::window: return "window";
    case ConstraintId::separator_window: return "separatorWindow";
    case ConstraintId::time_chain: return "timeChain";
    case ConstraintId::end_node_charge: return "endNodeCharge";
    case ConstraintId::min_range: return "minRange";
    case ConstraintId::gain_cap: return "gainCap";
    case ConstraintId::max_range: return "maxRange";
    case ConstraintId::range_chain: return "rangeChain";
    case ConstraintId::domain: return "domain";
  }
  return "unknown";
}

Weights Weights::raw(double wd, double wt, double wc) {
  Weights w;
  w.wd = wd;
  w.wt = wt;
  w.wc = wc;
  w.prefs = {wd, wt, wc};
  return w;
}

int Instance::event_count() const {
  int count = 0;
  for (const auto& v : nodes) {
    if (v.kind == NodeKind::fixed || v.kind == NodeKind::flexible) ++count;
  }
  return count;
}

int Schedule::stop_count() const {
  int count = 0;
  for (auto r : charge) count += r != 0;
  return count;
}

namespace {

[[noreturn]] void bad_instance(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, "instance: " + what);
}

void check_matrix(const Matrix& m, int n, const char* name) {
  if (m.size() != n || static_cast<int>(m.data().size()) != n * n) {
    bad_instance(std::string(name) + " is not " + std::to_string(n) + "x" + std::to_string(n));
  }
  for (int u = 0; u < n; ++u) {
    if (m(u, u) != 0.0) bad_instance(std::string(name) + " has a non-zero diagonal");
    for (int v = 0; v < n; ++v) {
      if (!(m(u, v) >= 0.0) || !std::isfinite(m(u, v))) {
        bad_instance(std::string(name) + " has a negative or non-finite entry");
      }
    }
  }
}

}  // namespace

void finalize(Instance& inst) {
  const int n = inst.size();
  if (n < 2) bad_instance("needs at least a start and an end node");
  check_matrix(inst.dist, n, "dist");
  check_matrix(inst.travel, n, "travel");
  if (!(0.0 <= inst.k_min && inst.k_min <= inst.k_start && inst.k_start <= inst.k_max)) {
    bad_instance("battery ranges must satisfy 0 <= kMin <= kStart <= kMax");
  }
  if (!(inst.epsilon >= 0.0)) bad_instance("epsilon must be >= 0");

  const auto& prefs = inst.weights.prefs;
  if (std::any_of(prefs.begin(), prefs.end(), [](double p) { return p < 0.0; }) ||
      std::abs(prefs[0] + prefs[1] + prefs[2] - 1.0) > 1e-9) {
    bad_instance("preferences must be non-negative and sum to 1");
  }

  inst.separator_pos.assign(static_cast<size_t>(n), -1);
  for (size_t i = 0; i < inst.separators.size(); ++i) {
    const NodeId s = inst.separators[i];
    if (s <= 0 || s >= n - 1) bad_instance("separator index out of range");
    if (i > 0 && s <= inst.separators[i - 1]) bad_instance("separators must be strictly increasing");
    inst.separator_pos[static_cast<size_t>(s)] = static_cast<int>(i);
  }

  inst.chain.clear();
  inst.free_nodes.clear();
  for (int u = 0; u < n; ++u) {
    const auto& v = inst.nodes[static_cast<size_t>(u)];
    if (v.id != u) bad_instance("node ids must equal their index");
    const bool want_start = u == 0;
    const bool want_end = u == n - 1;
    if ((v.kind == NodeKind::start) != want_start) bad_instance("node 0 and only node 0 is the start");
    if ((v.kind == NodeKind::end) != want_end) bad_instance("node n-1 and only node n-1 is the end");
    if ((v.kind == NodeKind::separator) != (inst.separator_pos[static_cast<size_t>(u)] >= 0)) {
      bad_instance("node " + std::to_string(u) + ": separator kind and separator list disagree");
    }
    if (v.a_min + v.duration > v.a_max + kTimeTol) {
      bad_instance("node " + std::to_string(u) + ": aMin + duration exceeds aMax");
    }
    if (v.duration < 0.0) bad_instance("node " + std::to_string(u) + ": negative duration");
    if (v.fixed_arrival.has_value() != (v.kind == NodeKind::fixed)) {
      bad_instance("node " + std::to_string(u) + ": fixed arrival present iff kind is fixed");
    }
    if (v.fixed_arrival && (*v.fixed_arrival < v.a_min - kTimeTol ||
                            *v.fixed_arrival > v.a_max - v.duration + kTimeTol)) {
      bad_instance("node " + std::to_string(u) + ": fixed arrival outside its window");
    }
    if (v.charging) {
      if (v.kind == NodeKind::end) bad_instance("the end node cannot offer charging");
      const auto& c = *v.charging;
      if (c.walk_time < 0.0 || c.rate < 0.0 || c.max_gain < 0.0) {
        bad_instance("node " + std::to_string(u) + ": negative charging parameter");
      }
    }
    if (v.kind == NodeKind::flexible) {
      inst.free_nodes.push_back(u);
    } else {
      inst.chain.push_back(u);
    }
  }

  inst.shortest_travel = inst.travel;
  Matrix& sp = inst.shortest_travel;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) sp(i, j) = std::min(sp(i, j), sp(i, k) + sp(k, j));
    }
  }
}

double separator_ref(NodeId u, const std::vector<double>& arrival, const Instance& inst) {
  if (u < 0 || u >= inst.size() || inst.separator_pos[static_cast<size_t>(u)] < 0) {
    throw Error(ErrorCode::invalid_argument, "node " + std::to_string(u) + " is not a separator");
  }
  const int pos = inst.separator_pos[static_cast<size_t>(u)];
  if (pos == 0) return arrival.at(0);
  return inst.node(inst.separators[static_cast<size_t>(pos - 1)]).a_max;
}

double evaluate_objective(const Schedule& s, const Instance& inst, const Weights& w) {
  const auto n = static_cast<size_t>(inst.size());
  if (s.arrival.size() != n || s.range.size() != n || s.charge.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "schedule vectors do not match the instance size");
  }
  for (NodeId u : s.order) {
    if (u < 0 || u >= inst.size()) throw Error(ErrorCode::dimension_mismatch, "order references unknown node");
  }
  double distance = 0.0;
  for (size_t i = 0; i + 1 < s.order.size(); ++i) distance += inst.dist(s.order[i], s.order[i + 1]);

  double day_time = 0.0;
  for (NodeId u : inst.separators) day_time += s.arrival[static_cast<size_t>(u)] - separator_ref(u, s.arrival, inst);

  double stops = 0.0;
  for (size_t u = 0; u + 1 < n; ++u) stops += s.charge[u];

  return w.wd * distance + w.wt * day_time - w.wc * s.range[n - 1] + inst.epsilon * stops +
         inst.epsilon * s.arrival[0];
}

double evaluate_objective(const Schedule& s, const Instance& inst) {
  return evaluate_objective(s, inst, inst.weights);
}

namespace {

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string node_loc(NodeId u) { return "node " + std::to_string(u); }
std::string edge_loc(NodeId u, NodeId v) { return "edge " + std::to_string(u) + "->" + std::to_string(v); }

class Reporter {
 public:
  void add(ConstraintId id, std::string location, std::string detail, double magnitude) {
    out.push_back({id, std::move(location), std::move(detail), magnitude > 0.0 ? magnitude : 1e-12});
  }
  std::vector<Violation> out;
};

}  // namespace

std::vector<Violation> validate(const Schedule& s, const Instance& inst) {
  Reporter rep;
  const int n = inst.size();
  const auto nn = static_cast<size_t>(n);

  if (s.arrival.size() != nn || s.charge.size() != nn || s.gain.size() != nn || s.range.size() != nn) {
    rep.add(ConstraintId::domain, "schedule", "per-node vectors must have " + std::to_string(n) + " entries", 1.0);
    return rep.out;
  }

  // Derived edge usage.
  std::vector<int> out_deg(nn, 0);
  std::vector<int> in_deg(nn, 0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  bool bad_ids = false;
  for (NodeId u : s.order) {
    if (u < 0 || u >= n) bad_ids = true;
  }
  if (bad_ids) {
    rep.add(ConstraintId::domain, "order", "order references an unknown node", 1.0);
    return rep.out;
  }
  for (size_t i = 0; i + 1 < s.order.size(); ++i) {
    const NodeId u = s.order[i];
    const NodeId v = s.order[i + 1];
    edges.emplace_back(u, v);
    ++out_deg[static_cast<size_t>(u)];
    ++in_deg[static_cast<size_t>(v)];
    if (u == v) rep.add(ConstraintId::self_cycle, edge_loc(u, v), "edge from a node to itself", 1.0);
  }
  for (int u = 0; u < n; ++u) {
    const int want_out = u == n - 1 ? 0 : 1;
    const int want_in = u == 0 ? 0 : 1;
    const auto uu = static_cast<size_t>(u);
    if (out_deg[uu] != want_out) {
      rep.add(ConstraintId::flow, node_loc(u),
              "outgoing edges " + std::to_string(out_deg[uu]) + ", expected " + std::to_string(want_out),
              std::abs(out_deg[uu] - want_out));
    }
    if (in_deg[uu] != want_in) {
      rep.add(ConstraintId::flow, node_loc(u),
              "incoming edges " + std::to_string(in_deg[uu]) + ", expected " + std::to_string(want_in),
              std::abs(in_deg[uu] - want_in));
    }
  }
  {
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [u, v] : edges) {
      if (u < v && std::binary_search(sorted.begin(), sorted.end(), std::make_pair(v, u))) {
        rep.add(ConstraintId::two_cycle, edge_loc(u, v), "both directions of the edge are used", 1.0);
      }
    }
  }

  // Variable domains.
  for (int u = 0; u < n; ++u) {
    const auto uu = static_cast<size_t>(u);
    const auto& node = inst.node(u);
    if (s.charge[uu] > 1) rep.add(ConstraintId::domain, node_loc(u), "charge flag is not binary", s.charge[uu]);
    if (s.charge[uu] == 1 && !node.chargeable() && u != n - 1) {
      rep.add(ConstraintId::domain, node_loc(u), "charging at a node without a charging option", 1.0);
    }
    if (!(s.arrival[uu] >= 0.0)) rep.add(ConstraintId::domain, node_loc(u), "negative arrival time", -s.arrival[uu]);
    if (!(s.range[uu] >= 0.0)) rep.add(ConstraintId::domain, node_loc(u), "negative range", -s.range[uu]);
    if (!(s.gain[uu] >= 0.0)) rep.add(ConstraintId::domain, node_loc(u), "negative charge gain", -s.gain[uu]);
  }
  if (s.charge[nn - 1] != 0) rep.add(ConstraintId::end_node_charge, node_loc(n - 1), "charging at the end node", 1.0);

  auto r_of = [&](NodeId u) { return s.charge[static_cast<size_t>(u)] ? 1.0 : 0.0; };
  auto walk = [&](NodeId u) { return r_of(u) * inst.node(u).walk_time(); };

  // Arrival times.
  for (int u = 0; u < n; ++u) {
    const auto& node = inst.node(u);
    const double a = s.arrival[static_cast<size_t>(u)];
    if (node.fixed_arrival) {
      const double want = *node.fixed_arrival - walk(u);
      if (std::abs(a - want) > kTimeTol) {
        rep.add(ConstraintId::fixed_arrival, node_loc(u), "arrival " + fmt6(a) + " != " + fmt6(want), std::abs(a - want));
      }
    }
    const double hi = node.a_max - node.duration - walk(u);
    if (node.kind == NodeKind::separator) {
      const double lo = separator_ref(u, s.arrival, inst) + walk(u);
      if (a < lo - kTimeTol) {
        rep.add(ConstraintId::separator_window, node_loc(u), "arrival " + fmt6(a) + " before " + fmt6(lo), lo - a);
      }
      if (a > hi + kTimeTol) {
        rep.add(ConstraintId::separator_window, node_loc(u), "arrival " + fmt6(a) + " after " + fmt6(hi), a - hi);
      }
    } else {
      const double lo = node.a_min - walk(u);
      if (a < lo - kTimeTol) rep.add(ConstraintId::window, node_loc(u), "arrival " + fmt6(a) + " before " + fmt6(lo), lo - a);
      if (a > hi + kTimeTol) rep.add(ConstraintId::window, node_loc(u), "arrival " + fmt6(a) + " after " + fmt6(hi), a - hi);
    }
  }
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    const auto& from = inst.node(u);
    const double uu_arr = s.arrival[static_cast<size_t>(u)];
    const double departure = from.kind == NodeKind::separator ? from.a_max + walk(u)
                                                              : uu_arr + from.duration + 2.0 * walk(u);
    const double earliest = departure + inst.travel(u, v);
    const double a = s.arrival[static_cast<size_t>(v)];
    if (a < earliest - kTimeTol) {
      rep.add(ConstraintId::time_chain, edge_loc(u, v), "arrival " + fmt6(a) + " before " + fmt6(earliest), earliest - a);
    }
  }

  // Battery.
  for (int u = 0; u < n; ++u) {
    const auto uu = static_cast<size_t>(u);
    if (s.range[uu] < inst.k_min - kRangeTol) {
      rep.add(ConstraintId::min_range, node_loc(u), "range " + fmt6(s.range[uu]) + " below " + fmt6(inst.k_min),
              inst.k_min - s.range[uu]);
    }
    if (u == n - 1) continue;
    const double cap = r_of(u) * inst.node(u).max_gain();
    if (s.gain[uu] > cap + kRangeTol) {
      rep.add(ConstraintId::gain_cap, node_loc(u), "gain " + fmt6(s.gain[uu]) + " above " + fmt6(cap), s.gain[uu] - cap);
    }
    if (s.range[uu] + s.gain[uu] > inst.k_max + kRangeTol) {
      rep.add(ConstraintId::max_range, node_loc(u), "range after charging " + fmt6(s.range[uu] + s.gain[uu]) +
                                                        " above " + fmt6(inst.k_max),
              s.range[uu] + s.gain[uu] - inst.k_max);
    }
  }
  if (s.gain[nn - 1] > kRangeTol) {
    rep.add(ConstraintId::gain_cap, node_loc(n - 1), "gain at the end node", s.gain[nn - 1]);
  }
  if (std::abs(s.range[0] - inst.k_start) > kRangeTol) {
    rep.add(ConstraintId::range_chain, node_loc(0), "initial range " + fmt6(s.range[0]) + " != " + fmt6(inst.k_start),
            std::abs(s.range[0] - inst.k_start));
  }
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    const double want = s.range[static_cast<size_t>(u)] + s.gain[static_cast<size_t>(u)] - inst.dist(u, v);
    const double got = s.range[static_cast<size_t>(v)];
    if (std::abs(got - want) > kRangeTol) {
      rep.add(ConstraintId::range_chain, edge_loc(u, v), "range " + fmt6(got) + " != " + fmt6(want), std::abs(got - want));
    }
  }
  return rep.out;
}

double min_edge_sum(const Matrix& m) {
  const int n = m.size();
  double total = 0.0;
  for (int u = 0; u < n - 1; ++u) {
    double best = std::numeric_limits<double>::infinity();
    for (int v = 1; v < n; ++v) {
      if (v != u) best = std::min(best, m(u, v));
    }
    if (std::isfinite(best)) total += best;
  }
  return total;
}

Weights weights_from_bounds(std::array<double, 3> prefs, const std::array<SummandBounds, 3>& bounds) {
  Weights w;
  w.prefs = prefs;
  w.bounds = bounds;
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    out[static_cast<size_t>(i)] =
        prefs[static_cast<size_t>(i)] / std::max(bounds[static_cast<size_t>(i)].upper - bounds[static_cast<size_t>(i)].lower, kWeightDelta);
  }
  w.wd = out[kDistance];
  w.wt = out[kTime];
  w.wc = out[kCharge];
  return w;
}

double objective_lower_bound(const Instance& inst, const Weights& w) {
  // The day-time summand and both epsilon terms are non-negative.
  return w.wd * min_edge_sum(inst.dist) - w.wc * inst.k_max;
}

}  // namespace evrp
