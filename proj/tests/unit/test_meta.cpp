#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "evrp/exact.hpp"
#include "evrp/meta.hpp"
#include "helpers.hpp"

using namespace evrp;
using namespace evrp::test;

namespace {

Instance one_flexible() {
  std::vector<EventNode> nodes{make_node(NodeKind::start, 0, 2000), make_node(NodeKind::flexible, 0, 2000, 30),
                               make_node(NodeKind::end, 0, 2000)};
  return make_instance(nodes, uniform_matrix(3, 5), uniform_matrix(3, 10), 0, 100, 100);
}

void expect_non_increasing(const std::vector<TracePoint>& trace) {
  for (size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i].best_objective, trace[i - 1].best_objective);
}

}  // namespace

TEST(Moves, SwapAndInsert) {
  const Route r{0, 1, 2, 3, 4, 5};
  EXPECT_EQ(apply_move(r, {MoveKind::swap, 1, 3}), (Route{0, 3, 2, 1, 4, 5}));
  EXPECT_EQ(apply_move(r, {MoveKind::insert, 1, 3}), (Route{0, 2, 3, 1, 4, 5}));
  EXPECT_EQ(apply_move(r, {MoveKind::insert, 4, 1}), (Route{0, 4, 1, 2, 3, 5}));
}

TEST(Moves, NeighborhoodKeepsChain) {
  const Instance inst = seed42();
  const auto moves = neighborhood(kSeed42Order, inst);
  EXPECT_FALSE(moves.empty());
  std::set<Route> seen;
  for (const auto& m : moves) {
    EXPECT_GE(std::min(m.i, m.j), 1);
    EXPECT_LE(std::max(m.i, m.j), inst.size() - 2);
    const Route r = apply_move(kSeed42Order, m);
    EXPECT_TRUE(respects_chain(r, inst));
    seen.insert(r);
  }
  EXPECT_FALSE(seen.count(kSeed42Order));
}

TEST(Tabu, DefaultLengthIsHalfTheEvents) {
  const Instance inst = generated(5, 10, 3);
  ASSERT_EQ(inst.event_count(), 10);
  EXPECT_EQ(default_tabu_length(inst), 5);
  TsParams p;
  p.iterations = 1;
  const auto r = tabu_search(inst, inst.weights, p);
  EXPECT_EQ(r.tabu_len_swap, 5);
  EXPECT_EQ(r.tabu_len_insert, 5);
}

TEST(Tabu, ZeroIterationsReturnsBfd) {
  const Instance inst = generated(8, 9, 2);
  TsParams p;
  p.iterations = 0;
  EXPECT_EQ(tabu_search(inst, inst.weights, p).schedule.order, bfd_initial(inst, inst.weights).order);
}

TEST(Tabu, Seed42ReachesOptimum) {
  const Instance inst = seed42();
  TsParams p;
  p.iterations = 200;
  EXPECT_NEAR(tabu_search(inst, inst.weights, p).schedule.objective, kSeed42Optimum, 1e-9);
}

TEST(Tabu, NoTabuMoveWithoutAspiration) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = generated(seed, 10, 2);
    TsParams p;
    p.iterations = 60;
    const auto r = tabu_search(inst, inst.weights, p);
    for (const auto& s : r.steps) EXPECT_FALSE(s.tabu) << "seed " << seed << " iteration " << s.iteration;
    expect_non_increasing(r.trace);
    EXPECT_TRUE(validate(r.schedule, inst).empty());
  }
}

TEST(Tabu, AspirationOnlyForNewBest) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = generated(seed, 10, 2);
    TsParams p;
    p.iterations = 60;
    p.aspiration = true;
    p.tabu_len_swap = 20;
    p.tabu_len_insert = 20;
    const auto r = tabu_search(inst, inst.weights, p);
    double best = bfd_initial(inst, inst.weights).objective;
    for (const auto& s : r.steps) {
      if (s.tabu) EXPECT_LT(s.objective, best);
      best = std::min(best, s.objective);
    }
  }
}

TEST(Tabu, Deterministic) {
  const Instance inst = generated(12, 14, 3);
  TsParams p;
  p.iterations = 40;
  EXPECT_EQ(tabu_search(inst, inst.weights, p).schedule.order, tabu_search(inst, inst.weights, p).schedule.order);
}

TEST(Tabu, RejectsNegativeLength) {
  const Instance inst = seed42();
  TsParams p;
  p.tabu_len_swap = -1;
  EXPECT_THROW(tabu_search(inst, inst.weights, p), Error);
}

TEST(Alns, DegreeOfDestruction) {
  Rng rng(1);
  AlnsParams p;
  EXPECT_EQ(degree_of_destruction(p, 9, 0, rng), 5);
  p.dod_static = 1.0;
  EXPECT_EQ(degree_of_destruction(p, 9, 3, rng), 9);
  p.dod_scheme = DodScheme::increasing;
  p.iterations = 11;
  EXPECT_EQ(degree_of_destruction(p, 9, 0, rng), 1);
  EXPECT_EQ(degree_of_destruction(p, 9, 10, rng), 9);
  int last = 0;
  for (int it = 0; it < 11; ++it) {
    const int d = degree_of_destruction(p, 9, it, rng);
    EXPECT_GE(d, last);
    last = d;
  }
  p.dod_scheme = DodScheme::random;
  std::set<int> seen;
  for (int it = 0; it < 500; ++it) {
    const int d = degree_of_destruction(p, 6, it, rng);
    EXPECT_GE(d, 1);
    EXPECT_LE(d, 6);
    seen.insert(d);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Alns, DestroyKeepsAnchors) {
  const Instance inst = seed42();
  Rng rng(3);
  for (int k = 1; k <= inst.event_count(); ++k) {
    const Destroyed d = destroy(kSeed42Order, inst, k, rng);
    EXPECT_EQ(static_cast<int>(d.removed.size()), k);
    EXPECT_EQ(d.skeleton.size() + d.removed.size(), kSeed42Order.size());
    for (NodeId u : d.removed) {
      const auto kind = inst.node(u).kind;
      EXPECT_TRUE(kind == NodeKind::fixed || kind == NodeKind::flexible);
    }
    EXPECT_EQ(d.skeleton.front(), 0);
    EXPECT_EQ(d.skeleton.back(), inst.end_node());
  }
}

TEST(Alns, ExactRepairDominatesConstructive) {
  const Instance inst = seed42();
  const AlnsParams p;
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    const Destroyed d = destroy(kSeed42Order, inst, 5, rng);
    Rng r1(seed);
    Rng r2(seed);
    const auto exact = repair(RepairOp::exact, d, inst, inst.weights, p, r1);
    const auto constructive = repair(RepairOp::constructive, d, inst, inst.weights, p, r2);
    EXPECT_FALSE(exact.exact_timeout);
    if (!constructive.schedule) continue;
    ASSERT_TRUE(exact.schedule);
    EXPECT_LE(exact.schedule->objective, constructive.schedule->objective + 1e-9);
    ++compared;
  }
  EXPECT_GT(compared, 0);
}

TEST(Alns, ExactRepairOverCapFallsBack) {
  const Instance inst = generated(6, 12, 2);
  AlnsParams p;
  p.exact_repair_max_removed = 2;
  Rng rng(4);
  const Schedule start = bfd_initial(inst, inst.weights);
  const Destroyed d = destroy(start.order, inst, 4, rng);
  const auto out = repair(RepairOp::exact, d, inst, inst.weights, p, rng);
  EXPECT_TRUE(out.exact_timeout);
}

TEST(Alns, ZeroIterationsReturnsBfd) {
  const Instance inst = generated(8, 9, 2);
  AlnsParams p;
  p.iterations = 0;
  EXPECT_EQ(alns(inst, inst.weights, p, 1).schedule.order, bfd_initial(inst, inst.weights).order);
}

TEST(Alns, ProbabilitiesAndWeights) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = generated(seed, 10, 2);
    AlnsParams p;
    p.iterations = 120;
    const auto r = alns(inst, inst.weights, p, seed);
    ASSERT_EQ(r.steps.size(), 120u);
    for (const auto& s : r.steps) {
      ASSERT_EQ(s.probabilities.size(), p.repair_set.size());
      EXPECT_NEAR(std::accumulate(s.probabilities.begin(), s.probabilities.end(), 0.0), 1.0, 1e-12);
      for (double x : s.probabilities) EXPECT_GE(x, 0.0);
      EXPECT_TRUE(s.score == 0 || s.score == 1 || s.score == 2 || s.score == 3);
    }
    for (double w : r.final_weights) EXPECT_GE(w, 0.0);
    expect_non_increasing(r.trace);
    EXPECT_TRUE(validate(r.schedule, inst).empty());
  }
}

TEST(Alns, Seed42ReachesOptimum) {
  const Instance inst = seed42();
  AlnsParams p;
  p.iterations = 200;
  EXPECT_NEAR(alns(inst, inst.weights, p, 1).schedule.objective, kSeed42Optimum, 1e-9);
}

TEST(Alns, Deterministic) {
  const Instance inst = generated(12, 14, 3);
  AlnsParams p;
  p.iterations = 60;
  const auto a = alns(inst, inst.weights, p, 9);
  const auto b = alns(inst, inst.weights, p, 9);
  EXPECT_EQ(a.schedule.order, b.schedule.order);
  EXPECT_EQ(a.final_weights, b.final_weights);
}

TEST(AcoArithmetic, UniformCandidates) {
  const auto p = aco_probabilities({1, 1, 1, 1}, {0.5, 0.5, 0.5, 0.5}, 1, 2);
  for (double x : p) EXPECT_NEAR(x, 0.25, 1e-12);
}

TEST(AcoArithmetic, SingleCandidate) {
  const auto p = aco_probabilities({3.0}, {0.1}, 1, 2);
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  Rng rng(1);
  EXPECT_EQ(aco_select({7}, {3.0}, {0.1}, 1, 2, rng), 7);
}

TEST(AcoArithmetic, WeightedPair) {
  const auto p = aco_probabilities({1, 2}, {0.5, 0.25}, 1, 2);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-12);
}

TEST(AcoArithmetic, SelectionFrequencies) {
  Rng rng(11);
  int first = 0;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) first += aco_select({4, 9}, {1, 2}, {0.5, 0.25}, 1, 2, rng) == 4;
  EXPECT_NEAR(static_cast<double>(first) / draws, 2.0 / 3.0, 0.01);
}

TEST(AcoArithmetic, EmptyCandidatesThrow) {
  Rng rng(1);
  EXPECT_THROW(aco_select({}, {}, {}, 1, 2, rng), Error);
  EXPECT_THROW(aco_probabilities({1, 0}, {1, 1}, 1, 2), Error);
}

TEST(AcoArithmetic, EvaporationOnly) {
  Matrix tau(3, 1.0);
  pheromone_update(tau, {}, nullptr, 0.01, 0.0);
  EXPECT_NEAR(tau(0, 1), 0.99, 1e-12);
}

TEST(AcoArithmetic, SingleDeposit) {
  Matrix tau(3, 1.0);
  // Shifted objective 4 through edges (0,1) and (1,2).
  const AntSolution s{{0, 1, 2}, 6.0};
  pheromone_update(tau, {s}, nullptr, 0.0, 2.0);
  EXPECT_NEAR(tau(0, 1), 1.25, 1e-12);
  EXPECT_NEAR(tau(1, 2), 1.25, 1e-12);
  EXPECT_NEAR(tau(0, 2), 1.0, 1e-12);
}

TEST(AcoArithmetic, FullEvaporationFloor) {
  Matrix tau(4, 5.0);
  pheromone_update(tau, {}, nullptr, 1.0, 0.0);
  for (double t : tau.data()) EXPECT_NEAR(t, kTauMin, 1e-12);
}

TEST(AcoArithmetic, BestSoFarCountedOnce) {
  Matrix tau(3, 1.0);
  const AntSolution s{{0, 1, 2}, 4.0};
  pheromone_update(tau, {s}, &s, 0.0, 0.0);
  EXPECT_NEAR(tau(0, 1), 1.25, 1e-12);
  const AntSolution other{{0, 2, 1}, 2.0};
  pheromone_update(tau, {s}, &other, 0.0, 0.0);
  EXPECT_NEAR(tau(0, 1), 1.5, 1e-12);
  EXPECT_NEAR(tau(0, 2), 1.5, 1e-12);
}

TEST(AcoArithmetic, HeuristicInformation) {
  const Instance inst = seed42();
  const Weights& w = inst.weights;
  EXPECT_NEAR(aco_eta(inst, w, 0, 1), 1.0 / (w.wd * inst.dist(0, 1) + w.wt * inst.travel(0, 1) + 1e-6), 1e-12);
  EXPECT_NEAR(pheromone_shift(inst, w), objective_lower_bound(inst, w) - 1e-6, 1e-12);
}

TEST(Aco, UniqueOrder) {
  const Instance inst = one_flexible();
  AcoParams p;
  p.iterations = 5;
  const auto r = aco(inst, inst.weights, p, 3);
  EXPECT_EQ(r.schedule.order, (Route{0, 1, 2}));
  EXPECT_EQ(r.dead_ends, 0);
}

TEST(Aco, Seed42ReachesOptimum) {
  const Instance inst = seed42();
  AcoParams p;
  p.iterations = 100;
  EXPECT_NEAR(aco(inst, inst.weights, p, 1).schedule.objective, kSeed42Optimum, 1e-9);
}

TEST(Aco, ValidDeterministicAndMonotone) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = generated(seed, 12, 3);
    AcoParams p;
    p.iterations = 30;
    const auto a = aco(inst, inst.weights, p, seed);
    const auto b = aco(inst, inst.weights, p, seed);
    EXPECT_EQ(a.schedule.order, b.schedule.order);
    EXPECT_TRUE(validate(a.schedule, inst).empty());
    expect_non_increasing(a.trace);
  }
}

TEST(Aco, RejectsBadParams) {
  const Instance inst = seed42();
  AcoParams p;
  p.rho = 1.5;
  EXPECT_THROW(aco(inst, inst.weights, p, 1), Error);
  p = {};
  p.ants = 0;
  EXPECT_THROW(aco(inst, inst.weights, p, 1), Error);
}
