#pragma once

// Exact solving: the exhaustive oracle for tiny instances, a depth-first
// branch-and-bound over visit orders, and the Big-M model emitter.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evrp/core.hpp"
#include "evrp/schedule.hpp"

namespace evrp {

inline constexpr int kOracleMaxNodes = 12;
inline constexpr int kLeafEnumerationMaxChargeable = 12;

// Minimum-objective feasible schedule over every chain-respecting order and
// every charge set, nullopt if the instance is infeasible. Ties go to the
// lexicographically smallest order. Throws Error(too_large) above
// kOracleMaxNodes nodes.
std::optional<Schedule> oracle(const Instance& inst, const Weights& w);

// Fewest charging stops over all charge sets for a fixed order, nullopt if
// no charge set makes the order feasible.
std::optional<int> min_stops_for_order(const Route& order, const Instance& inst, const Weights& w);

// Best charge set for a fixed route by enumeration; nullopt if infeasible.
std::optional<RouteEval> best_charges_for_route(const Route& route, const Instance& inst, const Weights& w);

enum class SolveStatus { optimal, time_limit, infeasible, heuristic_leaf };

const char* to_string(SolveStatus s);

struct BnBConfig {
  double time_limit = 15.0;  // seconds
  std::optional<std::int64_t> node_limit;
  std::optional<Schedule> incumbent_seed;
  bool seed_with_bfd = true;
  bool pruning = true;  // chain order, prefix times and objective bound

  void check() const;
};

struct IncumbentEvent {
  std::int64_t node;
  double objective;
};

struct BnBResult {
  std::optional<Schedule> schedule;
  SolveStatus status = SolveStatus::infeasible;
  std::int64_t nodes = 0;
  std::vector<IncumbentEvent> trace;  // every incumbent improvement
};

BnBResult solve_exact(const Instance& inst, const Weights& w, const BnBConfig& cfg = {});

// Completes a partial route exactly: `skeleton` keeps its relative order
// and every node of `missing` is inserted somewhere. Searches only the
// completions, with the same pruning as solve_exact.
BnBResult complete_exact(const Instance& inst, const Weights& w, const Route& skeleton,
                         const std::vector<NodeId>& missing, const BnBConfig& cfg);

enum class VarKind { continuous, binary };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = 0.0;
};

enum class Sense { le, ge, eq };

struct Term {
  int var;
  double coef;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
  double big_m = 0.0;  // 0 for rows without a Big-M term
};

struct LinearModel {
  std::vector<Variable> vars;
  std::vector<Term> objective;
  double objective_constant = 0.0;
  std::vector<Row> rows;
  double m_time = 0.0;
  double m_range = 0.0;

  int find(const std::string& name) const;
};

LinearModel linearize(const Instance& inst, const Weights& w);

// LP-format text of the model.
std::string to_lp(const LinearModel& model);

}  // namespace evrp
