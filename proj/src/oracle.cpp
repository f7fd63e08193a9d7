#include <algorithm>
#include <functional>
#include <limits>

#include "evrp/exact.hpp"

namespace evrp {

namespace {

std::vector<NodeId> chargeable_on(const Route& route, const Instance& inst) {
  std::vector<NodeId> out;
  for (NodeId u : route) {
    if (u != inst.end_node() && inst.node(u).chargeable()) out.push_back(u);
  }
  return out;
}

// Visits every chain-respecting permutation in lexicographic order,
// skipping prefixes whose earliest times already fail.
void for_each_order(const Instance& inst, const std::function<void(const Route&)>& visit) {
  const int n = inst.size();
  ForwardClock clock(inst);
  if (!clock.start_feasible()) return;
  Route route{0};
  std::vector<char> used(static_cast<size_t>(n), 0);
  used[0] = 1;
  size_t next_chain = 1;
  int placed_free = 0;
  const int total_free = static_cast<int>(inst.free_nodes.size());

  std::function<void()> rec = [&]() {
    if (static_cast<int>(route.size()) == n) {
      visit(route);
      return;
    }
    for (NodeId v = 1; v < n; ++v) {
      if (used[static_cast<size_t>(v)]) continue;
      const bool is_free = inst.node(v).kind == NodeKind::flexible;
      if (!is_free) {
        if (inst.chain[next_chain] != v) continue;
        if (v == n - 1 && placed_free < total_free) continue;
      }
      const auto a = clock.try_visit(v);
      if (!a) continue;
      used[static_cast<size_t>(v)] = 1;
      route.push_back(v);
      clock.push(v, *a);
      if (is_free) {
        ++placed_free;
      } else {
        ++next_chain;
      }
      rec();
      if (is_free) {
        --placed_free;
      } else {
        --next_chain;
      }
      clock.pop();
      route.pop_back();
      used[static_cast<size_t>(v)] = 0;
    }
  };
  rec();
}

}  // namespace

std::optional<Schedule> oracle(const Instance& inst, const Weights& w) {
  if (inst.size() > kOracleMaxNodes) {
    throw Error(ErrorCode::too_large, "oracle refuses " + std::to_string(inst.size()) + " nodes (limit " +
                                          std::to_string(kOracleMaxNodes) + ")");
  }
  std::vector<NodeId> all_chargeable;
  for (NodeId u = 0; u < inst.end_node(); ++u) {
    if (inst.node(u).chargeable()) all_chargeable.push_back(u);
  }
  const size_t m = all_chargeable.size();

  std::optional<RouteEval> best;
  ChargeFlags r(static_cast<size_t>(inst.size()), 0);
  for_each_order(inst, [&](const Route& order) {
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      for (size_t i = 0; i < m; ++i) r[static_cast<size_t>(all_chargeable[i])] = (mask >> i) & 1u;
      auto e = evaluate_with_charges(order, r, inst, w);
      if (e && (!best || e->objective < best->objective - 1e-12)) best = std::move(e);
    }
  });
  if (!best) return std::nullopt;
  return to_schedule(*best, inst);
}

std::optional<int> min_stops_for_order(const Route& order, const Instance& inst, const Weights& w) {
  const auto cand = chargeable_on(order, inst);
  const size_t m = cand.size();
  std::optional<int> best;
  ChargeFlags r(static_cast<size_t>(inst.size()), 0);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    const int stops = __builtin_popcount(mask);
    if (best && stops >= *best) continue;
    std::fill(r.begin(), r.end(), 0);
    for (size_t i = 0; i < m; ++i) r[static_cast<size_t>(cand[i])] = (mask >> i) & 1u;
    if (evaluate_with_charges(order, r, inst, w)) best = stops;
  }
  return best;
}

std::optional<RouteEval> best_charges_for_route(const Route& route, const Instance& inst, const Weights& w) {
  const auto cand = chargeable_on(route, inst);
  ChargeFlags r(static_cast<size_t>(inst.size()), 0);
  std::optional<RouteEval> best;
  // Adding a stop never makes infeasible times feasible again, so a
  // subtree is cut as soon as its charge set breaks the times.
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == cand.size()) {
      auto e = evaluate_with_charges(route, r, inst, w);
      if (e && (!best || e->objective < best->objective - 1e-12)) best = std::move(e);
      return;
    }
    rec(i + 1);
    r[static_cast<size_t>(cand[i])] = 1;
    if (propagate_times(route, r, inst, w).feasible_times) rec(i + 1);
    r[static_cast<size_t>(cand[i])] = 0;
  };
  if (propagate_times(route, r, inst, w).feasible_times) rec(0);
  return best;
}

}  // namespace evrp
