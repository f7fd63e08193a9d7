#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "evrp/exact.hpp"
#include "evrp/rng.hpp"
#include "helpers.hpp"

using namespace evrp;
using namespace evrp::test;

namespace {

Instance two_node(double d, Weights w) {
  return make_instance({make_node(NodeKind::start, 0, 1000), make_node(NodeKind::end, 0, 1000)}, matrix({{0, d}, {d, 0}}),
                       matrix({{0, 10}, {10, 0}}), 0, 100, 100, w, 0.0);
}

Schedule blank(int n) {
  Schedule s;
  s.arrival.assign(static_cast<size_t>(n), 0.0);
  s.charge.assign(static_cast<size_t>(n), 0);
  s.gain.assign(static_cast<size_t>(n), 0.0);
  s.range.assign(static_cast<size_t>(n), 0.0);
  return s;
}

// start, flexible, separator, flexible, end over two days.
Instance two_day() {
  std::vector<EventNode> nodes{
      make_node(NodeKind::start, 480, 1200),
      with_charging(make_node(NodeKind::flexible, 480, 1200, 60), 5, 80),
      make_node(NodeKind::separator, 480, 1920, 720),
      with_charging(make_node(NodeKind::flexible, 1920, 2640, 30), 3, 40),
      make_node(NodeKind::end, 1920, 2640),
  };
  return make_instance(nodes, uniform_matrix(5, 20), uniform_matrix(5, 30), 10, 100, 60, Weights::raw(0.4, 0.4, 0.2),
                       0.01);
}

}  // namespace

TEST(Objective, DistanceOnly) {
  const Instance inst = two_node(10, Weights::raw(1, 0, 0));
  Schedule s = blank(2);
  s.order = {0, 1};
  s.range = {100, 90};
  EXPECT_DOUBLE_EQ(evaluate_objective(s, inst), 10.0);
}

TEST(Objective, EndRangeOnly) {
  const Instance inst = two_node(10, Weights::raw(0, 0, 1));
  Schedule s = blank(2);
  s.order = {0, 1};
  s.range = {60, 50};
  EXPECT_DOUBLE_EQ(evaluate_objective(s, inst), -50.0);
}

TEST(Objective, DimensionMismatchThrows) {
  const Instance inst = two_node(10, Weights::raw(1, 0, 0));
  Schedule s = blank(3);
  s.order = {0, 1};
  try {
    evaluate_objective(s, inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

TEST(Objective, Seed42OptimumValue) {
  const Instance inst = seed42();
  const auto s = oracle(inst, inst.weights);
  ASSERT_TRUE(s);
  EXPECT_NEAR(evaluate_objective(*s, inst), kSeed42Optimum, 1e-9);
}

TEST(SeparatorRef, FirstSeparatorUsesStartTime) {
  const Instance inst = two_day();
  std::vector<double> a(5, 0.0);
  a[0] = 512.0;
  EXPECT_DOUBLE_EQ(separator_ref(2, a, inst), 512.0);
}

TEST(SeparatorRef, LaterSeparatorUsesPreviousLatestTime) {
  std::vector<EventNode> nodes{make_node(NodeKind::start, 0, 3000), make_node(NodeKind::separator, 0, 1140, 100),
                               make_node(NodeKind::separator, 1140, 2580, 100), make_node(NodeKind::end, 0, 3000)};
  const Instance inst = make_instance(nodes, uniform_matrix(4, 0), uniform_matrix(4, 0), 0, 10, 10);
  EXPECT_DOUBLE_EQ(separator_ref(2, std::vector<double>(4, 0.0), inst), 1140.0);  // 19:00
}

TEST(SeparatorRef, NonSeparatorThrows) {
  const Instance inst = two_day();
  EXPECT_THROW(separator_ref(1, std::vector<double>(5, 0.0), inst), Error);
}

TEST(Validate, Seed42OptimumIsClean) {
  const Instance inst = seed42();
  const auto s = oracle(inst, inst.weights);
  ASSERT_TRUE(s);
  EXPECT_TRUE(validate(*s, inst).empty());
}

TEST(Validate, MinRangeMagnitude) {
  const Instance inst = two_node(10, Weights::raw(1, 0, 0));
  Schedule s = blank(2);
  s.order = {0, 1};
  s.arrival = {0, 10};
  s.range = {100, 90};
  ASSERT_TRUE(validate(s, inst).empty());
  const Instance tight = make_instance({make_node(NodeKind::start, 0, 1000), make_node(NodeKind::end, 0, 1000)},
                                       matrix({{0, 10}, {10, 0}}), matrix({{0, 10}, {10, 0}}), 91, 100, 100);
  const auto vs = validate(s, tight);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].constraint, ConstraintId::min_range);
  EXPECT_NEAR(vs[0].magnitude, 1.0, 1e-12);
}

TEST(Validate, VisitingTwiceIsFlowViolation) {
  const Instance inst = two_day();
  Schedule s = *oracle(inst, inst.weights);
  s.order[2] = s.order[1];
  EXPECT_TRUE(has_violation(validate(s, inst), ConstraintId::flow));
}

TEST(Validate, ReportsEveryViolation) {
  const Instance inst = two_day();
  Schedule s = *oracle(inst, inst.weights);
  for (auto& k : s.range) k -= 1000.0;
  s.arrival[3] = 0.0;
  const auto vs = validate(s, inst);
  EXPECT_TRUE(has_violation(vs, ConstraintId::min_range));
  EXPECT_TRUE(has_violation(vs, ConstraintId::window));
  for (const auto& v : vs) EXPECT_GT(v.magnitude, 0.0);
}

TEST(Properties, DerivedEdgesHaveUnitDegree) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 9));
    std::vector<NodeId> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 2; i > 1; --i) std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(rng.uniform_int(1, i))]);
    std::vector<int> out(static_cast<size_t>(n), 0);
    std::vector<int> in(static_cast<size_t>(n), 0);
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      ++out[static_cast<size_t>(order[i])];
      ++in[static_cast<size_t>(order[i + 1])];
    }
    for (int u = 0; u < n; ++u) {
      EXPECT_EQ(out[static_cast<size_t>(u)], u == n - 1 ? 0 : 1);
      EXPECT_EQ(in[static_cast<size_t>(u)], u == 0 ? 0 : 1);
    }
  }
}

TEST(Properties, ObjectiveMonotoneInTimesAndEndRange) {
  const Instance inst = seed42();
  const Schedule s = *oracle(inst, inst.weights);
  const double base = evaluate_objective(s, inst);
  for (NodeId u : inst.separators) {
    Schedule t = s;
    t.arrival[static_cast<size_t>(u)] += 1.0;
    EXPECT_GE(evaluate_objective(t, inst), base);
  }
  Schedule later_end = s;
  later_end.range[static_cast<size_t>(inst.end_node())] += 1.0;
  EXPECT_LE(evaluate_objective(later_end, inst), base);

  // a_0 also enters through the first separator's reference, so it is
  // checked with the separators shifted along.
  Schedule shifted = s;
  shifted.arrival[0] += 1.0;
  for (NodeId u : inst.separators) shifted.arrival[static_cast<size_t>(u)] += 1.0;
  EXPECT_GE(evaluate_objective(shifted, inst), base);
}

TEST(Properties, AddingChargeNeverLowersLaterRanges) {
  const Instance inst = seed42();
  const Route& order = kSeed42Order;
  ChargeFlags r(static_cast<size_t>(inst.size()), 0);
  r[2] = 1;
  r[4] = 1;
  std::vector<double> small(static_cast<size_t>(inst.size()), 0.0);
  small[2] = 10.0;
  small[4] = 5.0;
  std::vector<double> big = small;
  big[4] = 40.0;
  const auto a = propagate_ranges(order, r, small, inst);
  const auto b = propagate_ranges(order, r, big, inst);
  for (int u = 0; u < inst.size(); ++u) EXPECT_GE(b.range[static_cast<size_t>(u)], a.range[static_cast<size_t>(u)] - 1e-12);
}

TEST(Properties, PreferenceScalingKeepsArgmin) {
  for (std::uint64_t seed : {3u, 11u, 19u}) {
    const Instance inst = generated(seed, 4);
    const std::array<double, 3> prefs{0.2, 0.5, 0.3};
    const auto a = oracle(inst, normalize_weights(inst, prefs));
    // Doubling then renormalizing yields the same preference triple up to rounding.
    std::array<double, 3> scaled{};
    const double sum = 2 * prefs[0] + 2 * prefs[1] + 2 * prefs[2];
    for (size_t i = 0; i < 3; ++i) scaled[i] = 2 * prefs[i] / sum;
    const auto b = oracle(inst, normalize_weights(inst, scaled));
    ASSERT_TRUE(a && b);
    EXPECT_EQ(a->order, b->order);
    EXPECT_EQ(a->charge, b->charge);
  }
}

TEST(Weights, SinglePreference) {
  std::array<SummandBounds, 3> bounds{SummandBounds{40, 100}, SummandBounds{0, 10}, SummandBounds{-5, -1}};
  const Weights w = weights_from_bounds({1, 0, 0}, bounds);
  EXPECT_NEAR(w.wd, 1.0 / 60.0, 1e-15);
  EXPECT_EQ(w.wt, 0.0);
  EXPECT_EQ(w.wc, 0.0);
}

TEST(Weights, DegenerateBoundsStayFinite) {
  std::array<SummandBounds, 3> bounds{SummandBounds{5, 5}, SummandBounds{0, 10}, SummandBounds{-5, -1}};
  const Weights w = weights_from_bounds({0.5, 0.25, 0.25}, bounds);
  EXPECT_DOUBLE_EQ(w.wd, 0.5 / kWeightDelta);
  EXPECT_TRUE(std::isfinite(w.wd));
}

TEST(Weights, RejectsBadPreferences) {
  const Instance inst = seed42();
  EXPECT_THROW(normalize_weights(inst, {0.5, 0.5, 0.5}), Error);
  EXPECT_THROW(normalize_weights(inst, {-0.5, 1.0, 0.5}), Error);
}

TEST(Weights, Seed42Bounds) {
  // Lower bounds from a hand sum of the cheapest edges, upper bounds from
  // the distance and travel time along the best-fit-decreasing order.
  const Instance inst = seed42();
  const Weights w = normalize_weights(inst, {0.5, 0.3, 0.2});
  EXPECT_NEAR(w.bounds[kDistance].lower, 47.984848, 1e-6);
  EXPECT_NEAR(w.bounds[kDistance].upper, 113.708873, 1e-6);
  EXPECT_NEAR(w.bounds[kTime].lower, 75.0, 1e-9);
  EXPECT_NEAR(w.bounds[kTime].upper, 174.0, 1e-9);
  EXPECT_NEAR(w.bounds[kCharge].lower, -inst.k_max, 1e-12);
  EXPECT_NEAR(w.bounds[kCharge].upper, -inst.k_min, 1e-12);
  EXPECT_NEAR(w.wd, 0.5 / (113.708873 - 47.984848), 1e-9);
}

TEST(Instance, FinalizeRejectsBrokenInvariants) {
  auto bad = [](auto mutate) {
    std::vector<EventNode> nodes{make_node(NodeKind::start, 0, 100), make_node(NodeKind::flexible, 0, 100, 10),
                                 make_node(NodeKind::end, 0, 100)};
    Matrix d = uniform_matrix(3, 1);
    double k_min = 0, k_max = 10, k_start = 5;
    mutate(nodes, d, k_min, k_max, k_start);
    return [=]() { make_instance(nodes, d, d, k_min, k_max, k_start); };
  };
  EXPECT_THROW(bad([](auto& n, auto&, auto&, auto&, auto&) { n[1].duration = 200; })(), Error);
  EXPECT_THROW(bad([](auto&, auto& d, auto&, auto&, auto&) { d(0, 1) = -1; })(), Error);
  EXPECT_THROW(bad([](auto&, auto& d, auto&, auto&, auto&) { d(1, 1) = 1; })(), Error);
  EXPECT_THROW(bad([](auto&, auto&, auto&, auto&, auto& ks) { ks = 20; })(), Error);
  EXPECT_THROW(bad([](auto& n, auto&, auto&, auto&, auto&) { n[2] = with_charging(n[2], 1, 1); })(), Error);
  EXPECT_THROW(bad([](auto& n, auto&, auto&, auto&, auto&) { n[0].kind = NodeKind::flexible; })(), Error);
  EXPECT_NO_THROW(bad([](auto&, auto&, auto&, auto&, auto&) {})());
}
