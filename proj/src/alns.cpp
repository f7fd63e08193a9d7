#include <algorithm>
#include <cmath>
#include <numeric>

#include "evrp/exact.hpp"
#include "evrp/meta.hpp"
#include "route_cache.hpp"

namespace evrp {

const char* to_string(DodScheme s) {
  switch (s) {
    case DodScheme::fixed: return "static";
    case DodScheme::increasing: return "increasing";
    case DodScheme::random: return "random";
  }
  return "?";
}

const char* to_string(RepairOp op) {
  switch (op) {
    case RepairOp::random: return "random";
    case RepairOp::constructive: return "constructive";
    case RepairOp::exact: return "exactMip";
  }
  return "?";
}

void AlnsParams::check() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::invalid_argument, std::string("AlnsParams: ") + what); };
  if (!(dod_static > 0.0 && dod_static <= 1.0)) fail("dodStatic must lie in (0, 1]");
  if (!(reaction >= 0.0 && reaction <= 1.0)) fail("reaction must lie in [0, 1]");
  if (iterations < 0) fail("iterations must be >= 0");
  if (segment < 1) fail("segment must be >= 1");
  if (repair_set.empty()) fail("repairSet must not be empty");
  if (exact_repair_max_removed < 0) fail("exactRepairMaxRemoved must be >= 0");
  if (exact_repair_node_limit < 1) fail("exactRepairNodeLimit must be >= 1");
  if (time_limit && !(*time_limit > 0.0)) fail("timeLimit must be > 0");
}

int degree_of_destruction(const AlnsParams& p, int events, int iteration, Rng& rng) {
  if (events <= 0) return 0;
  switch (p.dod_scheme) {
    case DodScheme::fixed:
      return std::clamp(static_cast<int>(std::ceil(p.dod_static * events - 1e-9)), 1, events);
    case DodScheme::increasing: {
      if (p.iterations <= 1) return 1;
      const double t = static_cast<double>(iteration) / (p.iterations - 1);
      return std::clamp(1 + static_cast<int>(std::floor(t * (events - 1) + 1e-9)), 1, events);
    }
    case DodScheme::random:
      return static_cast<int>(rng.uniform_int(1, events));
  }
  return 1;
}

Destroyed destroy(const Route& route, const Instance& inst, int count, Rng& rng) {
  std::vector<NodeId> pool;
  for (NodeId u : route) {
    const auto kind = inst.node(u).kind;
    if (kind == NodeKind::fixed || kind == NodeKind::flexible) pool.push_back(u);
  }
  const auto k = static_cast<size_t>(std::clamp(count, 0, static_cast<int>(pool.size())));
  for (size_t i = 0; i < k; ++i) {
    const auto j = static_cast<size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
    std::swap(pool[i], pool[j]);
  }
  Destroyed d;
  d.removed.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<char> gone(static_cast<size_t>(inst.size()), 0);
  for (NodeId u : d.removed) gone[static_cast<size_t>(u)] = 1;
  for (NodeId u : route) {
    if (!gone[static_cast<size_t>(u)]) d.skeleton.push_back(u);
  }
  return d;
}

namespace {

// Insertion positions p (before route[p]) that keep the chain order.
std::pair<size_t, size_t> insertion_range(const Route& route, NodeId v, const Instance& inst) {
  size_t lo = 1;
  size_t hi = route.size() - 1;
  if (inst.node(v).kind == NodeKind::flexible) return {lo, hi};
  for (size_t p = 0; p < route.size(); ++p) {
    const NodeId u = route[p];
    if (inst.node(u).kind == NodeKind::flexible) continue;
    if (u < v) {
      lo = std::max(lo, p + 1);
    } else {
      hi = std::min(hi, p);
      break;
    }
  }
  return {lo, hi};
}

std::optional<Schedule> finish(const Route& route, const Instance& inst, const Weights& w) {
  auto e = evaluate_route(route, inst, w);
  if (!e) return std::nullopt;
  return to_schedule(*e, inst);
}

std::optional<Schedule> repair_random(const Destroyed& d, const Instance& inst, const Weights& w, Rng& rng) {
  constexpr int kRetries = 50;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    Route route = d.skeleton;
    std::vector<NodeId> todo = d.removed;
    for (size_t i = 0; i + 1 < todo.size(); ++i) {
      const auto j = static_cast<size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(todo.size()) - 1));
      std::swap(todo[i], todo[j]);
    }
    for (NodeId v : todo) {
      const auto [lo, hi] = insertion_range(route, v, inst);
      const auto p = static_cast<size_t>(rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
      route.insert(route.begin() + static_cast<std::ptrdiff_t>(p), v);
    }
    if (auto s = finish(route, inst, w)) return s;
  }
  return std::nullopt;
}

Route constructive_route(const Destroyed& d, const Instance& inst, const Weights& w) {
  Route route = d.skeleton;
  std::vector<NodeId> todo = d.removed;
  const ChargeFlags none(static_cast<size_t>(inst.size()), 0);
  while (!todo.empty()) {
    struct Option {
      double cost;
      size_t idx;
      size_t pos;
    };
    std::vector<Option> options;
    for (size_t k = 0; k < todo.size(); ++k) {
      const NodeId v = todo[k];
      const auto [lo, hi] = insertion_range(route, v, inst);
      for (size_t p = lo; p <= hi; ++p) {
        const NodeId a = route[p - 1];
        const NodeId b = route[p];
        const double dd = inst.dist(a, v) + inst.dist(v, b) - inst.dist(a, b);
        const double dt = inst.travel(a, v) + inst.travel(v, b) - inst.travel(a, b);
        options.push_back({w.wd * dd + w.wt * dt, k, p});
      }
    }
    std::stable_sort(options.begin(), options.end(), [](const Option& x, const Option& y) { return x.cost < y.cost; });
    const Option* pick = &options.front();
    for (const Option& o : options) {
      Route trial = route;
      trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(o.pos), todo[o.idx]);
      if (propagate_times(trial, none, inst, w).feasible_times) {
        pick = &o;
        break;
      }
    }
    route.insert(route.begin() + static_cast<std::ptrdiff_t>(pick->pos), todo[pick->idx]);
    todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(pick->idx));
  }
  return route;
}

}  // namespace

RepairOutcome repair(RepairOp op, const Destroyed& d, const Instance& inst, const Weights& w, const AlnsParams& p,
                     Rng& rng) {
  RepairOutcome out;
  switch (op) {
    case RepairOp::random:
      out.schedule = repair_random(d, inst, w, rng);
      break;
    case RepairOp::constructive:
      out.schedule = finish(constructive_route(d, inst, w), inst, w);
      break;
    case RepairOp::exact: {
      auto seed = finish(constructive_route(d, inst, w), inst, w);
      if (static_cast<int>(d.removed.size()) > p.exact_repair_max_removed) {
        out.exact_timeout = true;
        out.schedule = std::move(seed);
        break;
      }
      BnBConfig cfg;
      cfg.time_limit = 3600.0;
      cfg.node_limit = p.exact_repair_node_limit;
      cfg.seed_with_bfd = false;
      cfg.incumbent_seed = std::move(seed);
      BnBResult r = complete_exact(inst, w, d.skeleton, d.removed, cfg);
      out.exact_timeout = r.status == SolveStatus::time_limit;
      out.schedule = std::move(r.schedule);
      break;
    }
  }
  return out;
}

AlnsResult alns(const Instance& inst, const Weights& w, const AlnsParams& p, std::uint64_t seed) {
  p.check();
  AlnsResult out;
  const Deadline deadline(p.time_limit);
  Rng rng(seed);

  Schedule current = bfd_initial(inst, w);
  Schedule best = current;
  const size_t ops = p.repair_set.size();
  std::vector<double> weight(ops, 1.0);
  std::vector<double> seg_score(ops, 0.0);
  std::vector<int> seg_uses(ops, 0);
  const int events = inst.event_count();

  for (int it = 0; it < p.iterations; ++it) {
    if (deadline.passed()) {
      out.time_limited = true;
      break;
    }
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    std::vector<double> prob(ops);
    for (size_t i = 0; i < ops; ++i) prob[i] = total > 0.0 ? weight[i] / total : 1.0 / static_cast<double>(ops);

    const int dod = degree_of_destruction(p, events, it, rng);
    const Destroyed d = destroy(current.order, inst, dod, rng);

    const double u = rng.uniform();
    size_t pick = ops - 1;
    double acc = 0.0;
    for (size_t i = 0; i < ops; ++i) {
      acc += prob[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }

    RepairOutcome r = repair(p.repair_set[pick], d, inst, w, p, rng);
    int score = 0;
    if (r.schedule) {
      if (r.schedule->objective < best.objective - 1e-12) {
        score = 3;
        best = *r.schedule;
        current = std::move(*r.schedule);
      } else if (r.schedule->objective < current.objective - 1e-12) {
        score = 2;
        current = std::move(*r.schedule);
      } else {
        score = 1;
      }
    }
    seg_score[pick] += score;
    ++seg_uses[pick];
    out.steps.push_back({it, static_cast<int>(d.removed.size()), p.repair_set[pick], score, r.exact_timeout, prob});
    out.trace.push_back({it, best.objective});

    if ((it + 1) % p.segment == 0) {
      for (size_t i = 0; i < ops; ++i) {
        if (seg_uses[i] > 0) weight[i] = (1.0 - p.reaction) * weight[i] + p.reaction * seg_score[i] / seg_uses[i];
        seg_score[i] = 0.0;
        seg_uses[i] = 0;
      }
    }
  }
  out.schedule = std::move(best);
  out.final_weights = std::move(weight);
  return out;
}

}  // namespace evrp
