#include "evrp/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace evrp {

namespace {

double walk(const Instance& inst, const ChargeFlags& r, NodeId u) {
  return r[static_cast<size_t>(u)] ? inst.node(u).walk_time() : 0.0;
}

double departure(const Instance& inst, const ChargeFlags& r, NodeId u, double arrival) {
  const auto& node = inst.node(u);
  if (node.kind == NodeKind::separator) return node.a_max + walk(inst, r, u);
  return arrival + node.duration + 2.0 * walk(inst, r, u);
}

// Latest admissible arrival at `u`.
double upper_arrival(const Instance& inst, const ChargeFlags& r, NodeId u) {
  const auto& node = inst.node(u);
  if (node.fixed_arrival) return *node.fixed_arrival - walk(inst, r, u);
  return node.a_max - node.duration - walk(inst, r, u);
}

double separator_lower(const Instance& inst, const ChargeFlags& r, NodeId u, double a0) {
  const int pos = inst.separator_pos[static_cast<size_t>(u)];
  const double ref = pos == 0 ? a0 : inst.node(inst.separators[static_cast<size_t>(pos - 1)]).a_max;
  return ref + walk(inst, r, u);
}

// Earliest arrival at `v` given the earliest possible arrival `e` from its
// predecessor; nullopt if the window of `v` cannot be met.
std::optional<double> settle(const Instance& inst, const ChargeFlags& r, NodeId v, double e, double a0) {
  const auto& node = inst.node(v);
  if (node.fixed_arrival) {
    const double pin = *node.fixed_arrival - walk(inst, r, v);
    if (e > pin + kTimeTol) return std::nullopt;
    return pin;
  }
  const double lo = node.kind == NodeKind::separator ? separator_lower(inst, r, v, a0) : node.a_min - walk(inst, r, v);
  const double a = std::max(e, lo);
  if (a > upper_arrival(inst, r, v) + kTimeTol) return std::nullopt;
  return a;
}

// Forward pass from a given start time. Returns the first violating node or -1.
NodeId forward_pass(const Route& route, const ChargeFlags& r, const Instance& inst, double a0,
                    std::vector<double>& arrival) {
  std::fill(arrival.begin(), arrival.end(), 0.0);
  const NodeId first = route.front();
  const auto& start = inst.node(first);
  const double lo0 = start.a_min - walk(inst, r, first);
  if (a0 < lo0 - kTimeTol || a0 > upper_arrival(inst, r, first) + kTimeTol) return first;
  arrival[static_cast<size_t>(first)] = a0;
  for (size_t i = 1; i < route.size(); ++i) {
    const NodeId u = route[i - 1];
    const NodeId v = route[i];
    const double e = departure(inst, r, u, arrival[static_cast<size_t>(u)]) + inst.travel(u, v);
    const auto a = settle(inst, r, v, e, a0);
    if (!a) return v;
    arrival[static_cast<size_t>(v)] = *a;
  }
  return -1;
}

}  // namespace

TimedOrder propagate_times(const Route& route, const ChargeFlags& charge, const Instance& inst, const Weights& w) {
  TimedOrder out;
  out.order = route;
  out.arrival.assign(static_cast<size_t>(inst.size()), 0.0);
  if (route.empty()) return out;

  const NodeId first = route.front();
  const double lo0 = inst.node(first).a_min - walk(inst, charge, first);
  const NodeId bad = forward_pass(route, charge, inst, lo0, out.arrival);
  if (bad >= 0) {
    out.first_violation = bad;
    return out;
  }
  out.feasible_times = true;

  // The first separator's day time is a_S1 - a_0. While a_S1 stays put a
  // later start is strictly better when wt > epsilon; past that point each
  // minute of delay costs epsilon. So start as late as the first
  // separator's earliest arrival allows.
  if (inst.separators.empty() || !(w.wt > inst.epsilon) || first != 0) return out;
  const NodeId s1 = inst.separators.front();
  const auto it = std::find(route.begin(), route.end(), s1);
  if (it == route.end()) return out;
  const auto p = static_cast<size_t>(it - route.begin());
  const double target = out.arrival[static_cast<size_t>(s1)];

  double latest = target;
  for (size_t q = p; q-- > 0;) {
    const NodeId u = route[q];
    const NodeId v = route[q + 1];
    const double cand = latest - inst.travel(u, v) - inst.node(u).duration - 2.0 * walk(inst, charge, u);
    latest = std::min(upper_arrival(inst, charge, u), cand);
  }
  const double a0 = std::max(lo0, std::min(latest, target - walk(inst, charge, s1)));
  if (a0 <= lo0) return out;

  std::vector<double> shifted(out.arrival.size(), 0.0);
  if (forward_pass(route, charge, inst, a0, shifted) < 0) out.arrival = std::move(shifted);
  return out;
}

RangeProfile propagate_ranges(const Route& route, const ChargeFlags& charge, const Instance& inst) {
  std::vector<double> requested(static_cast<size_t>(inst.size()), 0.0);
  for (NodeId u : route) {
    if (charge[static_cast<size_t>(u)]) requested[static_cast<size_t>(u)] = inst.node(u).max_gain();
  }
  return propagate_ranges(route, charge, requested, inst);
}

RangeProfile propagate_ranges(const Route& route, const ChargeFlags& charge, const std::vector<double>& requested,
                              const Instance& inst) {
  RangeProfile out;
  const auto n = static_cast<size_t>(inst.size());
  out.range.assign(n, 0.0);
  out.gain.assign(n, 0.0);
  double k = inst.k_start;
  for (size_t i = 0; i < route.size(); ++i) {
    const NodeId u = route[i];
    const auto uu = static_cast<size_t>(u);
    out.range[uu] = k;
    if (out.deficit_pos < 0 && k < inst.k_min - kRangeTol) {
      out.deficit_pos = static_cast<int>(i);
      out.deficit_node = u;
    }
    if (i + 1 == route.size()) break;
    const double g = charge[uu] ? std::clamp(requested[uu], 0.0, std::max(0.0, inst.k_max - k)) : 0.0;
    out.gain[uu] = g;
    k = k + g - inst.dist(u, route[i + 1]);
  }
  return out;
}

double route_objective(const Route& route, const std::vector<double>& arrival, const ChargeFlags& charge,
                       const std::vector<double>& range, const Instance& inst, const Weights& w) {
  double distance = 0.0;
  double day_time = 0.0;
  double stops = 0.0;
  for (size_t i = 0; i < route.size(); ++i) {
    const NodeId u = route[i];
    if (i + 1 < route.size()) distance += inst.dist(u, route[i + 1]);
    if (inst.separator_pos[static_cast<size_t>(u)] >= 0) {
      day_time += arrival[static_cast<size_t>(u)] - separator_ref(u, arrival, inst);
    }
    if (u != inst.end_node()) stops += charge[static_cast<size_t>(u)];
  }
  return w.wd * distance + w.wt * day_time - w.wc * range[static_cast<size_t>(route.back())] +
         inst.epsilon * stops + inst.epsilon * arrival[static_cast<size_t>(route.front())];
}

namespace {

struct Eval {
  TimedOrder times;
  RangeProfile ranges;
  double objective = std::numeric_limits<double>::infinity();

  bool time_ok() const { return times.feasible_times; }
  bool feasible() const { return times.feasible_times && ranges.feasible(); }
};

class Planner {
 public:
  Planner(const Route& route, const Instance& inst, const Weights& w) : route_(route), inst_(inst), w_(w) {
    for (NodeId u : route_) {
      if (u != inst_.end_node() && inst_.node(u).chargeable()) candidates_.push_back(u);
    }
  }

  Eval eval(const ChargeFlags& r) const {
    Eval e;
    e.times = propagate_times(route_, r, inst_, w_);
    if (!e.times.feasible_times) return e;
    e.ranges = propagate_ranges(route_, r, inst_);
    e.objective = route_objective(route_, e.times.arrival, r, e.ranges.range, inst_, w_);
    return e;
  }

  // Unflagged candidates at route positions before `limit`, best first.
  std::vector<NodeId> ranked(const ChargeFlags& r, const Eval& e, size_t limit) const {
    std::vector<std::pair<double, NodeId>> scored;
    for (size_t i = 0; i < limit && i < route_.size(); ++i) {
      const NodeId u = route_[i];
      if (u == inst_.end_node() || r[static_cast<size_t>(u)] || !inst_.node(u).chargeable()) continue;
      const double gain = std::min(inst_.node(u).max_gain(), inst_.k_max - e.ranges.range[static_cast<size_t>(u)]);
      if (gain <= kRangeTol) continue;
      scored.emplace_back(charging_priority(gain, inst_.node(u).walk_time()), u);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<NodeId> out;
    out.reserve(scored.size());
    for (const auto& s : scored) out.push_back(s.second);
    return out;
  }

  // Fewest stops over subsets of the candidates with sizes in
  // [min_size, max_size); best objective among those. Skipped entirely when
  // the subsets to visit exceed the evaluation budget.
  std::optional<std::pair<ChargeFlags, Eval>> fewest_stops(size_t min_size, size_t max_size) const {
    const size_t m = candidates_.size();
    max_size = std::min(max_size, m + 1);
    if (min_size >= max_size) return std::nullopt;

    // Range balance: the route needs at least `need` km of charge in total.
    double need = inst_.k_min - inst_.k_start;
    for (size_t i = 0; i + 1 < route_.size(); ++i) need += inst_.dist(route_[i], route_[i + 1]);
    std::vector<double> gains;
    for (NodeId u : candidates_) gains.push_back(std::min(inst_.node(u).max_gain(), inst_.k_max - inst_.k_min));
    std::sort(gains.begin(), gains.end(), std::greater<>());
    double top = 0.0;
    for (size_t k = 0; k < min_size && k < gains.size(); ++k) top += gains[k];
    while (min_size < max_size && min_size <= gains.size() && top < need - kRangeTol) {
      if (min_size < gains.size()) top += gains[min_size];
      ++min_size;
    }
    if (min_size >= max_size) return std::nullopt;

    double total = 0.0;
    double binom = 1.0;
    for (size_t k = 1; k < max_size; ++k) {
      binom = binom * static_cast<double>(m - k + 1) / static_cast<double>(k);
      if (k >= min_size) total += binom;
    }
    if (total > kMinStopSearchBudget) return std::nullopt;

    for (size_t k = min_size; k < max_size; ++k) {
      std::optional<std::pair<ChargeFlags, Eval>> best;
      std::vector<size_t> idx(k);
      std::iota(idx.begin(), idx.end(), 0);
      while (true) {
        ChargeFlags r(static_cast<size_t>(inst_.size()), 0);
        for (size_t i : idx) r[static_cast<size_t>(candidates_[i])] = 1;
        Eval e = eval(r);
        if (e.feasible() && (!best || e.objective < best->second.objective - 1e-12)) best.emplace(r, std::move(e));
        size_t i = k;
        while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
      }
      if (best) return best;
    }
    return std::nullopt;
  }

  const Route& route_;
  const Instance& inst_;
  const Weights& w_;
  std::vector<NodeId> candidates_;
};

}  // namespace

std::optional<ChargePlan> plan_charging(const Route& route, const Instance& inst, const Weights& w,
                                        PlannerStats* stats) {
  Planner pl(route, inst, w);
  ChargeFlags r(static_cast<size_t>(inst.size()), 0);
  Eval cur = pl.eval(r);
  if (!cur.time_ok()) return std::nullopt;

  // (a) repair range deficits greedily.
  std::vector<NodeId> added;
  bool greedy_ok = true;
  while (!cur.ranges.feasible()) {
    bool chosen = false;
    for (NodeId c : pl.ranked(r, cur, static_cast<size_t>(cur.ranges.deficit_pos))) {
      r[static_cast<size_t>(c)] = 1;
      Eval next = pl.eval(r);
      if (next.time_ok()) {
        cur = std::move(next);
        added.push_back(c);
        chosen = true;
        break;
      }
      r[static_cast<size_t>(c)] = 0;
    }
    if (!chosen) {
      greedy_ok = false;
      break;
    }
  }
  if (stats) stats->greedy_stops = static_cast<int>(added.size());

  const bool wants_charge = w.wc > 0.0;
  if (greedy_ok && !wants_charge) {
    // Drop stops made redundant by later ones.
    for (auto it = added.rbegin(); it != added.rend(); ++it) {
      r[static_cast<size_t>(*it)] = 0;
      Eval next = pl.eval(r);
      if (next.feasible()) {
        cur = std::move(next);
      } else {
        r[static_cast<size_t>(*it)] = 1;
      }
    }
  }
  // Greedy ranking does not guarantee the fewest stops; search smaller
  // subsets while that is affordable.
  const size_t have = greedy_ok ? static_cast<size_t>(std::count(r.begin(), r.end(), 1)) : pl.candidates_.size() + 1;
  if (have > 1 || !greedy_ok) {
    const size_t min_size = 1;
    if (auto better = pl.fewest_stops(min_size, have)) {
      r = better->first;
      cur = std::move(better->second);
      greedy_ok = true;
      if (stats) stats->refined = true;
    }
  }
  if (!greedy_ok) return std::nullopt;

  // (b) extra stops when the end-of-route charge matters: the addition with
  // the largest objective gain, else the best-ranked one that charges enough.
  if (wants_charge) {
    const size_t last = static_cast<size_t>(route.back());
    while (true) {
      std::optional<std::pair<NodeId, Eval>> improving;
      std::optional<std::pair<NodeId, Eval>> bulk;
      for (NodeId c : pl.ranked(r, cur, route.size())) {
        r[static_cast<size_t>(c)] = 1;
        Eval next = pl.eval(r);
        r[static_cast<size_t>(c)] = 0;
        if (!next.time_ok()) continue;
        const double best = improving ? improving->second.objective : cur.objective;
        if (next.objective < best - 1e-12) {
          improving.emplace(c, std::move(next));
        } else if (!bulk && next.ranges.range[last] - cur.ranges.range[last] >= kExtraChargeShare * inst.k_max) {
          bulk.emplace(c, std::move(next));
        }
      }
      auto& pick = improving ? improving : bulk;
      if (!pick) break;
      r[static_cast<size_t>(pick->first)] = 1;
      cur = std::move(pick->second);
    }
  }

  ChargePlan plan;
  plan.charge = std::move(r);
  plan.gain = std::move(cur.ranges.gain);
  return plan;
}

std::optional<RouteEval> evaluate_with_charges(const Route& route, const ChargeFlags& charge, const Instance& inst,
                                               const Weights& w) {
  RouteEval out;
  out.times = propagate_times(route, charge, inst, w);
  if (!out.times.feasible_times) return std::nullopt;
  out.ranges = propagate_ranges(route, charge, inst);
  if (!out.ranges.feasible()) return std::nullopt;
  out.charge = charge;
  out.objective = route_objective(route, out.times.arrival, charge, out.ranges.range, inst, w);
  return out;
}

std::optional<RouteEval> evaluate_route(const Route& route, const Instance& inst, const Weights& w) {
  auto plan = plan_charging(route, inst, w);
  if (!plan) return std::nullopt;
  return evaluate_with_charges(route, plan->charge, inst, w);
}

Schedule to_schedule(const RouteEval& e, const Instance& inst) {
  Schedule s;
  s.order = e.times.order;
  s.arrival = e.times.arrival;
  s.charge = e.charge;
  s.gain = e.ranges.gain;
  s.range = e.ranges.range;
  s.charge.resize(static_cast<size_t>(inst.size()), 0);
  s.objective = e.objective;
  return s;
}

namespace {

void require_permutation(const Route& order, const Instance& inst) {
  const int n = inst.size();
  if (static_cast<int>(order.size()) != n || order.front() != 0 || order.back() != n - 1) {
    throw Error(ErrorCode::invalid_argument, "order must visit all nodes from 0 to n-1");
  }
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (NodeId u : order) {
    if (u < 0 || u >= n || seen[static_cast<size_t>(u)]) {
      throw Error(ErrorCode::invalid_argument, "order is not a permutation");
    }
    seen[static_cast<size_t>(u)] = 1;
  }
}

}  // namespace

std::optional<Schedule> assemble_schedule(const Route& order, const Instance& inst, const Weights& w) {
  require_permutation(order, inst);
  auto e = evaluate_route(order, inst, w);
  if (!e) return std::nullopt;
  return to_schedule(*e, inst);
}

bool respects_chain(const Route& route, const Instance& inst) {
  NodeId last = -1;
  for (NodeId u : route) {
    if (inst.node(u).kind == NodeKind::flexible) continue;
    if (u <= last) return false;
    last = u;
  }
  return true;
}

double gap_slack(const Route& route, const TimedOrder& times, const ChargeFlags& charge, size_t closing_pos,
                 const Instance& inst) {
  const NodeId v = route[closing_pos];
  const NodeId u = route[closing_pos - 1];
  const double e = departure(inst, charge, u, times.arrival[static_cast<size_t>(u)]) + inst.travel(u, v);
  return upper_arrival(inst, charge, v) - e;
}

Schedule bfd_initial(const Instance& inst, const Weights& weights) {
  // Slots are fitted under fixed distance-only weights so that the result
  // does not depend on `weights`; the final route is planned with them.
  const Weights w = Weights::raw(1.0, 0.0, 0.0);
  Route route = inst.chain;
  auto current = evaluate_route(route, inst, w);
  if (!current) throw Error(ErrorCode::no_initial_solution, "the fixed skeleton is infeasible");

  std::vector<NodeId> flex = inst.free_nodes;
  std::stable_sort(flex.begin(), flex.end(), [&](NodeId a, NodeId b) {
    if (inst.node(a).duration != inst.node(b).duration) return inst.node(a).duration > inst.node(b).duration;
    return a < b;
  });

  for (NodeId f : flex) {
    struct Pick {
      double slack;
      size_t pos;
      RouteEval eval;
    };
    std::optional<Pick> best;
    size_t gap_begin = 0;  // route position of the gap's opening anchor
    for (size_t g = 0; g + 1 < inst.chain.size(); ++g) {
      size_t gap_end = gap_begin + 1;
      while (route[gap_end] != inst.chain[g + 1]) ++gap_end;

      // Within the gap: the slot with the smallest added travel time.
      std::optional<std::pair<size_t, RouteEval>> in_gap;
      double best_dt = 0.0;
      double best_dd = 0.0;
      for (size_t pos = gap_begin + 1; pos <= gap_end; ++pos) {
        const NodeId a = route[pos - 1];
        const NodeId b = route[pos];
        const double dt = inst.travel(a, f) + inst.travel(f, b) - inst.travel(a, b);
        const double dd = inst.dist(a, f) + inst.dist(f, b) - inst.dist(a, b);
        if (in_gap && (dt > best_dt || (dt == best_dt && dd >= best_dd))) continue;
        Route trial = route;
        trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), f);
        auto e = evaluate_route(trial, inst, w);
        if (!e) continue;
        in_gap.emplace(pos, std::move(*e));
        best_dt = dt;
        best_dd = dd;
      }
      if (in_gap) {
        Route trial = route;
        trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(in_gap->first), f);
        const double slack = gap_slack(trial, in_gap->second.times, in_gap->second.charge, gap_end + 1, inst);
        if (!best || slack < best->slack) best = Pick{slack, in_gap->first, std::move(in_gap->second)};
      }
      gap_begin = gap_end;
    }
    if (!best) {
      throw Error(ErrorCode::no_initial_solution, "flexible event " + std::to_string(f) + " fits no gap");
    }
    route.insert(route.begin() + static_cast<std::ptrdiff_t>(best->pos), f);
    current = std::move(best->eval);
  }
  current = evaluate_route(route, inst, weights);
  if (!current) throw Error(ErrorCode::no_initial_solution, "charging plan lost on the completed route");
  return to_schedule(*current, inst);
}

ForwardClock::ForwardClock(const Instance& inst) : inst_(&inst) {
  const auto& start = inst.node(0);
  stack_.push_back({0, start.a_min});
  // Charging at the start moves a_0 earlier by the walk but its departure
  // later, so the earliest start reference is aMin - walk.
  a0_ref_ = start.a_min - start.walk_time();
  start_ok_ = start.a_min <= start.a_max - start.duration + kTimeTol;
}

std::optional<double> ForwardClock::arrive(NodeId u, double arrival, NodeId v, double travel) const {
  const Instance& inst = *inst_;
  const auto& node = inst.node(u);
  const double dep = node.kind == NodeKind::separator ? node.a_max : arrival + node.duration;
  const double e = dep + travel;
  const auto& target = inst.node(v);
  if (target.fixed_arrival) {
    if (e > *target.fixed_arrival + kTimeTol) return std::nullopt;
    return *target.fixed_arrival;
  }
  double lo = target.a_min;
  if (target.kind == NodeKind::separator) {
    const int pos = inst.separator_pos[static_cast<size_t>(v)];
    lo = pos == 0 ? a0_ref_ : inst.node(inst.separators[static_cast<size_t>(pos - 1)]).a_max;
  }
  const double a = std::max(e, lo);
  if (a > target.a_max - target.duration + kTimeTol) return std::nullopt;
  return a;
}

bool ForwardClock::strands_free(NodeId v, double arrival, const std::vector<char>& used) const {
  for (NodeId f : inst_->free_nodes) {
    if (f != v && !used[static_cast<size_t>(f)] && !reachable_after(v, arrival, f)) return true;
  }
  return false;
}

}  // namespace evrp
