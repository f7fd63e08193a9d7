#pragma once

// Metaheuristics over visit orders: tabu search, adaptive large
// neighbourhood search and ant colony optimization. Every candidate order
// is turned into a schedule by the greedy charging planner.

#include <cstdint>
#include <optional>
#include <vector>

#include "evrp/core.hpp"
#include "evrp/rng.hpp"
#include "evrp/schedule.hpp"

namespace evrp {

enum class MoveKind { swap, insert };

// Positions are route positions in [1, n-2]. An insert move takes the node
// at position i out and reinserts it so that it ends up at position j.
struct Move {
  MoveKind kind = MoveKind::swap;
  int i = 0;
  int j = 0;

  bool operator==(const Move&) const = default;
};

Route apply_move(const Route& route, const Move& m);

// Every swap and insert move whose result keeps the chain order.
std::vector<Move> neighborhood(const Route& route, const Instance& inst);

struct TracePoint {
  int iteration;
  double best_objective;
};

struct MetaResult {
  Schedule schedule;
  std::vector<TracePoint> trace;  // best-so-far after each iteration
  bool time_limited = false;
};

// Ceil(N / 2) for N events.
int default_tabu_length(const Instance& inst);

struct TsParams {
  std::optional<int> tabu_len_swap;    // default_tabu_length when unset
  std::optional<int> tabu_len_insert;
  int iterations = 500;
  bool aspiration = false;
  std::optional<double> time_limit;  // seconds

  void check() const;
};

struct TsStep {
  int iteration;
  Move move;
  bool tabu;  // the chosen move was on a tabu list
  double objective;
};

struct TsResult : MetaResult {
  std::vector<TsStep> steps;
  int tabu_len_swap = 0;
  int tabu_len_insert = 0;
};

// Tabu search started from the best-fit-decreasing schedule. The search is
// deterministic; `seed` is accepted for a uniform solver signature.
TsResult tabu_search(const Instance& inst, const Weights& w, const TsParams& p, std::uint64_t seed = 0);

enum class DodScheme { fixed, increasing, random };
enum class RepairOp { random, constructive, exact };

const char* to_string(DodScheme s);
const char* to_string(RepairOp op);

struct AlnsParams {
  DodScheme dod_scheme = DodScheme::fixed;
  double dod_static = 0.5;
  int iterations = 500;
  std::vector<RepairOp> repair_set{RepairOp::random, RepairOp::constructive, RepairOp::exact};
  int segment = 20;
  double reaction = 0.2;
  int exact_repair_max_removed = 9;
  std::int64_t exact_repair_node_limit = 20000;
  std::optional<double> time_limit;  // seconds

  void check() const;
};

struct AlnsStep {
  int iteration;
  int removed;
  RepairOp op;
  int score;                           // 3 new best, 2 improved, 1 feasible, 0 failed
  bool exact_timeout;                  // exact repair skipped or cut short
  std::vector<double> probabilities;   // operator probabilities used for the draw
};

struct AlnsResult : MetaResult {
  std::vector<AlnsStep> steps;
  std::vector<double> final_weights;
};

// Degree of destruction at `iteration` (0-based) for N events.
int degree_of_destruction(const AlnsParams& p, int events, int iteration, Rng& rng);

struct Destroyed {
  Route skeleton;
  std::vector<NodeId> removed;
};

// Removes `count` events (never start, end or separators) uniformly at random.
Destroyed destroy(const Route& route, const Instance& inst, int count, Rng& rng);

struct RepairOutcome {
  std::optional<Schedule> schedule;
  bool exact_timeout = false;
};

RepairOutcome repair(RepairOp op, const Destroyed& d, const Instance& inst, const Weights& w, const AlnsParams& p,
                     Rng& rng);

AlnsResult alns(const Instance& inst, const Weights& w, const AlnsParams& p, std::uint64_t seed);

inline constexpr double kEtaOffset = 1e-6;
inline constexpr double kTauMin = 1e-9;
inline constexpr double kDeltaF = 1e-6;

struct AcoParams {
  double alpha = 1.0;
  double beta = 2.0;
  double rho = 0.01;
  int ants = 10;
  int iterations = 200;
  double tau0 = 1.0;
  std::optional<double> time_limit;  // seconds
  // When set, the run is abandoned after the first iteration if that
  // iteration's time times `iterations` exceeds the budget.
  std::optional<double> projected_budget;

  void check() const;
};

// Selection probabilities tau^alpha eta^beta / sum over the candidates.
std::vector<double> aco_probabilities(const std::vector<double>& tau, const std::vector<double>& eta, double alpha,
                                      double beta);

// Draws one of `candidates`; tau and eta are per candidate.
// Throws Error(invalid_argument) on an empty candidate set.
NodeId aco_select(const std::vector<NodeId>& candidates, const std::vector<double>& tau,
                  const std::vector<double>& eta, double alpha, double beta, Rng& rng);

double aco_eta(const Instance& inst, const Weights& w, NodeId i, NodeId j);

struct AntSolution {
  Route route;
  double objective = 0.0;
};

// Objective shift that makes every feasible objective at least kDeltaF.
double pheromone_shift(const Instance& inst, const Weights& w);

// Evaporation plus a deposit of 1 / (f - shift) on every edge of every
// iteration solution and of the best-so-far (counted once).
void pheromone_update(Matrix& tau, const std::vector<AntSolution>& iteration, const AntSolution* best, double rho,
                      double shift);

struct AcoResult : MetaResult {
  int dead_ends = 0;
  bool abandoned = false;
  double first_iteration_seconds = 0.0;
};

// Throws Error(no_solution_found) if no ant completes a feasible route.
AcoResult aco(const Instance& inst, const Weights& w, const AcoParams& p, std::uint64_t seed);

}  // namespace evrp
