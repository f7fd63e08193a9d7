#pragma once

// Solver dispatch, solution quality and the ensemble benchmark.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evrp/core.hpp"
#include "evrp/meta.hpp"

namespace evrp {

enum class SolverId { exact, ts, alns, aco, hybrid, bfd, oracle };

const char* to_string(SolverId s);
// Throws Error(invalid_argument) for an unknown name.
SolverId solver_from_string(const std::string& s);

struct SolverOptions {
  double time_limit = 15.0;  // seconds, per run
  std::optional<std::int64_t> node_limit;  // branch-and-bound nodes
  std::uint64_t seed = 1;
  TsParams ts;
  AlnsParams alns;
  AcoParams aco;
};

struct SolveOutcome {
  std::optional<Schedule> schedule;
  std::string status;               // "ok", "timeLimit", or a solver status
  std::vector<TracePoint> trace;
  SolverId engine = SolverId::exact;  // the solver that produced the schedule
  bool fallback = false;              // hybrid switched from ACO to ALNS
};

// Runs one solver. Solver errors such as an infeasible instance are
// reported in `status`, not thrown.
SolveOutcome run_solver(SolverId id, const Instance& inst, const Weights& w, const SolverOptions& opt);

inline constexpr int kHybridExactBelow = 15;
inline constexpr int kHybridTabuBelow = 45;

// Solver picked for N events before any budget check.
SolverId hybrid_choice(int events);

// Exact below 15 events, tabu search below 45, ACO beyond; ACO hands over
// to ALNS when its projected run time exceeds `budget` seconds.
SolveOutcome hybrid_dispatch(const Instance& inst, const Weights& w, double budget, const SolverOptions& opt = {});

// (reference + shift) / (objective + shift).
double quality(double objective, double reference, double shift);

// Shift that makes every objective of `inst` at least 1.
double quality_shift(const Instance& inst, const Weights& w);

struct BenchConfig {
  std::vector<std::uint64_t> seeds;
  double per_run_time_limit = 15.0;
  std::vector<SolverId> solvers;
  std::vector<int> sizes;  // event counts
  std::string out_dir;
  std::optional<std::int64_t> node_limit;
  int max_days = 5;

  // 100 seeds, all five solvers, sizes 5 to 40 in steps of 5.
  static BenchConfig defaults();
  void check() const;
};

struct SolverReport {
  SolverId solver;
  std::uint64_t seed;
  int events;
  int nodes;
  std::optional<double> objective;
  std::optional<double> quality;
  double reference = 0.0;
  double shift = 0.0;
  double wall_ms = 0.0;
  std::string status;
  std::vector<TracePoint> trace;
};

// Runs every (size, seed, solver) triple and computes qualities. Rows are
// ordered by size, seed and solver.
std::vector<SolverReport> run_benchmark(const BenchConfig& cfg);

// CSV writers. Timings live in their own files so that the other reports
// are reproducible byte for byte.
void write_runs_csv(std::ostream& out, const std::vector<SolverReport>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SolverReport>& rows);
void write_traces_csv(std::ostream& out, const std::vector<SolverReport>& rows);
void write_timings_csv(std::ostream& out, const std::vector<SolverReport>& rows);
void write_timing_summary_csv(std::ostream& out, const std::vector<SolverReport>& rows);

// run_benchmark plus every CSV in cfg.out_dir. On failure a PARTIAL marker
// file is left next to the rows finished so far and the error is rethrown.
std::vector<SolverReport> run_benchmark_to_dir(const BenchConfig& cfg);

// Fixed six-decimal formatting used in every CSV.
std::string format_fixed6(double x);

}  // namespace evrp
