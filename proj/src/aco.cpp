#include <algorithm>
#include <cmath>

#include "evrp/meta.hpp"
#include "route_cache.hpp"

namespace evrp {

void AcoParams::check() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::invalid_argument, std::string("AcoParams: ") + what); };
  if (!(rho >= 0.0 && rho <= 1.0)) fail("rho must lie in [0, 1]");
  if (ants < 1) fail("ants must be >= 1");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) fail("alpha and beta must be >= 0");
  if (iterations < 0) fail("iterations must be >= 0");
  if (!(tau0 > 0.0)) fail("tau0 must be > 0");
  if (time_limit && !(*time_limit > 0.0)) fail("timeLimit must be > 0");
  if (projected_budget && !(*projected_budget > 0.0)) fail("projected budget must be > 0");
}

std::vector<double> aco_probabilities(const std::vector<double>& tau, const std::vector<double>& eta, double alpha,
                                      double beta) {
  if (tau.empty() || tau.size() != eta.size()) {
    throw Error(ErrorCode::invalid_argument, "aco: need one tau and one eta per candidate");
  }
  std::vector<double> p(tau.size());
  double total = 0.0;
  for (size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0.0) || !(eta[i] > 0.0)) throw Error(ErrorCode::invalid_argument, "aco: tau and eta must be > 0");
    p[i] = std::pow(tau[i], alpha) * std::pow(eta[i], beta);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

NodeId aco_select(const std::vector<NodeId>& candidates, const std::vector<double>& tau,
                  const std::vector<double>& eta, double alpha, double beta, Rng& rng) {
  if (candidates.empty()) throw Error(ErrorCode::invalid_argument, "aco: empty candidate set");
  if (candidates.size() != tau.size()) throw Error(ErrorCode::invalid_argument, "aco: one tau per candidate");
  const auto p = aco_probabilities(tau, eta, alpha, beta);
  const double u = rng.uniform();
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return candidates[i];
  }
  return candidates.back();
}

double aco_eta(const Instance& inst, const Weights& w, NodeId i, NodeId j) {
  return 1.0 / (w.wd * inst.dist(i, j) + w.wt * inst.travel(i, j) + kEtaOffset);
}

double pheromone_shift(const Instance& inst, const Weights& w) { return objective_lower_bound(inst, w) - kDeltaF; }

void pheromone_update(Matrix& tau, const std::vector<AntSolution>& iteration, const AntSolution* best, double rho,
                      double shift) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::invalid_argument, "pheromone update: rho must lie in [0, 1]");
  for (double& t : tau.data()) t *= 1.0 - rho;
  auto deposit = [&](const AntSolution& s) {
    const double amount = 1.0 / std::max(s.objective - shift, kDeltaF);
    for (size_t i = 0; i + 1 < s.route.size(); ++i) tau(s.route[i], s.route[i + 1]) += amount;
  };
  for (const auto& s : iteration) deposit(s);
  if (best) {
    const bool seen = std::any_of(iteration.begin(), iteration.end(), [&](const AntSolution& s) { return s.route == best->route; });
    if (!seen) deposit(*best);
  }
  for (double& t : tau.data()) t = std::max(t, kTauMin);
}

namespace {

// One ant's order, or nullopt on a dead end.
std::optional<Route> construct(const Instance& inst, const Matrix& tau, const Matrix& eta, const AcoParams& p,
                               Rng& rng) {
  const int n = inst.size();
  ForwardClock clock(inst);
  if (!clock.start_feasible()) return std::nullopt;
  Route route{0};
  std::vector<char> used(static_cast<size_t>(n), 0);
  used[0] = 1;
  size_t next_chain = 1;
  std::vector<NodeId> cand;
  std::vector<double> arrival;
  std::vector<double> t;
  std::vector<double> e;
  while (static_cast<int>(route.size()) < n) {
    const NodeId i = route.back();
    cand.clear();
    arrival.clear();
    t.clear();
    e.clear();
    const bool only_end_left = static_cast<int>(route.size()) == n - 1;
    for (NodeId v = 1; v < n; ++v) {
      if (used[static_cast<size_t>(v)]) continue;
      if (v == n - 1 && !only_end_left) continue;
      if (inst.node(v).kind != NodeKind::flexible && inst.chain[next_chain] != v) continue;
      const auto a = clock.try_visit(v);
      if (!a) continue;
      if (inst.node(v).kind == NodeKind::flexible && !clock.reachable_after(v, *a, inst.chain[next_chain])) continue;
      if (clock.strands_free(v, *a, used)) continue;
      cand.push_back(v);
      arrival.push_back(*a);
      t.push_back(tau(i, v));
      e.push_back(eta(i, v));
    }
    if (cand.empty()) return std::nullopt;
    const NodeId v = aco_select(cand, t, e, p.alpha, p.beta, rng);
    const auto k = static_cast<size_t>(std::find(cand.begin(), cand.end(), v) - cand.begin());
    clock.push(v, arrival[k]);
    route.push_back(v);
    used[static_cast<size_t>(v)] = 1;
    if (inst.node(v).kind != NodeKind::flexible) ++next_chain;
  }
  return route;
}

}  // namespace

AcoResult aco(const Instance& inst, const Weights& w, const AcoParams& p, std::uint64_t seed) {
  p.check();
  AcoResult out;
  const Deadline deadline(p.time_limit);
  Rng rng(seed);
  const int n = inst.size();
  Matrix tau(n, p.tau0);
  Matrix eta(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j) eta(i, j) = aco_eta(inst, w, i, j);
    }
  }
  const double shift = pheromone_shift(inst, w);
  RouteCache cache(inst, w);
  std::optional<AntSolution> best;

  for (int it = 0; it < p.iterations; ++it) {
    if (deadline.passed()) {
      out.time_limited = true;
      break;
    }
    std::vector<AntSolution> found;
    for (int ant = 0; ant < p.ants; ++ant) {
      auto route = construct(inst, tau, eta, p, rng);
      if (!route) {
        ++out.dead_ends;
        continue;
      }
      const auto obj = cache.objective(*route);
      if (!obj) {
        ++out.dead_ends;
        continue;
      }
      found.push_back({std::move(*route), *obj});
      if (!best || found.back().objective < best->objective - 1e-12) best = found.back();
    }
    pheromone_update(tau, found, best ? &*best : nullptr, p.rho, shift);
    if (best) out.trace.push_back({it, best->objective});

    if (it == 0) {
      out.first_iteration_seconds = deadline.elapsed();
      if (p.projected_budget && out.first_iteration_seconds * p.iterations > *p.projected_budget) {
        out.abandoned = true;
        break;
      }
    }
  }
  if (!best) {
    if (out.abandoned) return out;
    throw Error(ErrorCode::no_solution_found, "no ant completed a feasible route");
  }
  out.schedule = to_schedule(*evaluate_route(best->route, inst, w), inst);
  return out;
}

}  // namespace evrp
