#include "evrp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "evrp/exact.hpp"
#include "evrp/gen.hpp"

namespace evrp {

const char* to_string(SolverId s) {
  switch (s) {
    case SolverId::exact: return "exact";
    case SolverId::ts: return "ts";
    case SolverId::alns: return "alns";
    case SolverId::aco: return "aco";
    case SolverId::hybrid: return "hybrid";
    case SolverId::bfd: return "bfd";
    case SolverId::oracle: return "oracle";
  }
  return "?";
}

SolverId solver_from_string(const std::string& s) {
  for (SolverId id : {SolverId::exact, SolverId::ts, SolverId::alns, SolverId::aco, SolverId::hybrid, SolverId::bfd,
                      SolverId::oracle}) {
    if (s == to_string(id)) return id;
  }
  throw Error(ErrorCode::invalid_argument, "unknown solver '" + s + "'");
}

namespace {

std::vector<TracePoint> bnb_trace(const BnBResult& r) {
  std::vector<TracePoint> out;
  for (const auto& e : r.trace) out.push_back({static_cast<int>(std::min<std::int64_t>(e.node, INT32_MAX)), e.objective});
  return out;
}

template <typename R>
void take_meta(SolveOutcome& out, R&& r) {
  out.schedule = std::move(r.schedule);
  out.trace = std::move(r.trace);
  out.status = r.time_limited ? "timeLimit" : "ok";
}

}  // namespace

SolveOutcome run_solver(SolverId id, const Instance& inst, const Weights& w, const SolverOptions& opt) {
  SolveOutcome out;
  out.engine = id;
  try {
    switch (id) {
      case SolverId::exact: {
        BnBConfig cfg;
        cfg.time_limit = opt.time_limit;
        cfg.node_limit = opt.node_limit;
        BnBResult r = solve_exact(inst, w, cfg);
        out.schedule = std::move(r.schedule);
        out.status = to_string(r.status);
        out.trace = bnb_trace(r);
        break;
      }
      case SolverId::ts: {
        TsParams p = opt.ts;
        if (!p.time_limit) p.time_limit = opt.time_limit;
        take_meta(out, tabu_search(inst, w, p, opt.seed));
        break;
      }
      case SolverId::alns: {
        AlnsParams p = opt.alns;
        if (!p.time_limit) p.time_limit = opt.time_limit;
        take_meta(out, alns(inst, w, p, opt.seed));
        break;
      }
      case SolverId::aco: {
        AcoParams p = opt.aco;
        if (!p.time_limit) p.time_limit = opt.time_limit;
        take_meta(out, aco(inst, w, p, opt.seed));
        break;
      }
      case SolverId::hybrid:
        return hybrid_dispatch(inst, w, opt.time_limit, opt);
      case SolverId::bfd:
        out.schedule = bfd_initial(inst, w);
        out.status = "ok";
        break;
      case SolverId::oracle:
        out.schedule = oracle(inst, w);
        out.status = out.schedule ? "optimal" : "infeasible";
        break;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_initial_solution && e.code() != ErrorCode::no_solution_found) throw;
    out.schedule.reset();
    out.status = to_string(e.code());
  }
  return out;
}

SolverId hybrid_choice(int events) {
  if (events < kHybridExactBelow) return SolverId::exact;
  if (events < kHybridTabuBelow) return SolverId::ts;
  return SolverId::aco;
}

SolveOutcome hybrid_dispatch(const Instance& inst, const Weights& w, double budget, const SolverOptions& opt) {
  if (!(budget > 0.0)) throw Error(ErrorCode::invalid_argument, "hybrid budget must be > 0");
  SolverOptions o = opt;
  o.time_limit = budget;
  const SolverId pick = hybrid_choice(inst.event_count());
  if (pick != SolverId::aco) return run_solver(pick, inst, w, o);

  AcoParams p = o.aco;
  p.projected_budget = budget;
  if (!p.time_limit) p.time_limit = budget;
  SolveOutcome out;
  out.engine = SolverId::aco;
  try {
    AcoResult r = aco(inst, w, p, o.seed);
    if (!r.abandoned) {
      take_meta(out, std::move(r));
      return out;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_solution_found) throw;
  }
  out = run_solver(SolverId::alns, inst, w, o);
  out.fallback = true;
  return out;
}

double quality(double objective, double reference, double shift) {
  return (reference + shift) / (objective + shift);
}

double quality_shift(const Instance& inst, const Weights& w) { return -objective_lower_bound(inst, w) + 1.0; }

BenchConfig BenchConfig::defaults() {
  BenchConfig c;
  for (std::uint64_t s = 1; s <= 100; ++s) c.seeds.push_back(s);
  c.solvers = {SolverId::exact, SolverId::ts, SolverId::alns, SolverId::aco, SolverId::hybrid};
  for (int n = 5; n <= 40; n += 5) c.sizes.push_back(n);
  c.out_dir = "bench-out";
  return c;
}

void BenchConfig::check() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::invalid_argument, std::string("BenchConfig: ") + what); };
  if (seeds.empty()) fail("seeds must not be empty");
  if (!(per_run_time_limit > 0.0)) fail("perRunTimeLimit must be > 0");
  if (sizes.empty()) fail("sizes must not be empty");
  for (int s : sizes) {
    if (s < 1) fail("sizes must be >= 1");
  }
  if (max_days < 1) fail("maxDays must be >= 1");
  if (node_limit && *node_limit < 1) fail("nodeLimit must be >= 1");
}

namespace {

void run_rows(const BenchConfig& cfg, std::vector<SolverReport>& rows) {
  cfg.check();
  for (int size : cfg.sizes) {
    for (std::uint64_t seed : cfg.seeds) {
      GenConfig g;
      g.seed = seed;
      g.min_events = size;
      g.max_events = size;
      g.max_days = cfg.max_days;
      const Instance inst = generate(g);
      const Weights& w = inst.weights;
      const double shift = quality_shift(inst, w);

      SolverOptions opt;
      opt.time_limit = cfg.per_run_time_limit;
      opt.node_limit = cfg.node_limit;
      opt.seed = seed;

      const size_t first = rows.size();
      for (SolverId id : cfg.solvers) {
        const auto t0 = std::chrono::steady_clock::now();
        SolveOutcome r = run_solver(id, inst, w, opt);
        const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
        SolverReport rep;
        rep.solver = id;
        rep.seed = seed;
        rep.events = inst.event_count();
        rep.nodes = inst.size();
        if (r.schedule) rep.objective = r.schedule->objective;
        rep.shift = shift;
        rep.wall_ms = dt.count();
        rep.status = r.status;
        if (r.fallback) rep.status += "+alns";
        rep.trace = std::move(r.trace);
        rows.push_back(std::move(rep));
      }

      // Reference: the proven optimum when the exact solver has one, else
      // the best objective any solver found.
      std::optional<double> reference;
      bool proven = false;
      for (size_t i = first; i < rows.size(); ++i) {
        if (rows[i].solver == SolverId::exact && rows[i].status == "optimal" && rows[i].objective) {
          reference = rows[i].objective;
          proven = true;
        }
      }
      if (!proven) {
        for (size_t i = first; i < rows.size(); ++i) {
          if (rows[i].objective && (!reference || *rows[i].objective < *reference)) reference = rows[i].objective;
        }
      }
      for (size_t i = first; i < rows.size(); ++i) {
        auto& row = rows[i];
        if (!reference) continue;
        row.reference = *reference;
        if (row.objective) row.quality = std::min(1.0, quality(*row.objective, *reference, shift));
      }
    }
  }
}

std::string csv_opt(const std::optional<double>& x) { return x ? format_fixed6(*x) : std::string(); }

struct Bucket {
  int runs = 0;
  int solved = 0;
  int rated = 0;
  double quality = 0.0;
  double objective = 0.0;
  std::vector<double> wall;
};

std::map<std::pair<int, int>, Bucket> buckets(const std::vector<SolverReport>& rows) {
  std::map<std::pair<int, int>, Bucket> out;
  for (const auto& r : rows) {
    Bucket& b = out[{r.events, static_cast<int>(r.solver)}];
    ++b.runs;
    if (r.objective) {
      ++b.solved;
      b.objective += *r.objective;
    }
    if (r.quality) {
      ++b.rated;
      b.quality += *r.quality;
    }
    b.wall.push_back(r.wall_ms);
  }
  return out;
}

void write_file(const std::filesystem::path& path, void (*writer)(std::ostream&, const std::vector<SolverReport>&),
                const std::vector<SolverReport>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  writer(out, rows);
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

void write_all(const std::filesystem::path& dir, const std::vector<SolverReport>& rows) {
  write_file(dir / "runs.csv", write_runs_csv, rows);
  write_file(dir / "summary.csv", write_summary_csv, rows);
  write_file(dir / "traces.csv", write_traces_csv, rows);
  write_file(dir / "timings.csv", write_timings_csv, rows);
  write_file(dir / "timing_summary.csv", write_timing_summary_csv, rows);
}

}  // namespace

std::vector<SolverReport> run_benchmark(const BenchConfig& cfg) {
  std::vector<SolverReport> rows;
  run_rows(cfg, rows);
  return rows;
}

std::string format_fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void write_runs_csv(std::ostream& out, const std::vector<SolverReport>& rows) {
  out << "seed,events,nodes,solver,status,objective,reference,shift,quality\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.events << ',' << r.nodes << ',' << to_string(r.solver) << ',' << r.status << ','
        << csv_opt(r.objective) << ',' << (r.quality ? format_fixed6(r.reference) : std::string()) << ','
        << format_fixed6(r.shift) << ',' << csv_opt(r.quality) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SolverReport>& rows) {
  out << "events,solver,runs,solved,mean_objective,mean_quality\n";
  for (const auto& [key, b] : buckets(rows)) {
    out << key.first << ',' << to_string(static_cast<SolverId>(key.second)) << ',' << b.runs << ',' << b.solved << ','
        << (b.solved ? format_fixed6(b.objective / b.solved) : std::string()) << ','
        << (b.rated ? format_fixed6(b.quality / b.rated) : std::string()) << '\n';
  }
}

void write_traces_csv(std::ostream& out, const std::vector<SolverReport>& rows) {
  out << "seed,events,solver,iteration,best_objective\n";
  for (const auto& r : rows) {
    for (const auto& t : r.trace) {
      out << r.seed << ',' << r.events << ',' << to_string(r.solver) << ',' << t.iteration << ','
          << format_fixed6(t.best_objective) << '\n';
    }
  }
}

void write_timings_csv(std::ostream& out, const std::vector<SolverReport>& rows) {
  out << "seed,events,solver,wall_ms\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.events << ',' << to_string(r.solver) << ',' << format_fixed6(r.wall_ms) << '\n';
  }
}

void write_timing_summary_csv(std::ostream& out, const std::vector<SolverReport>& rows) {
  out << "events,solver,runs,mean_wall_ms,median_wall_ms\n";
  for (auto& [key, b] : buckets(rows)) {
    std::vector<double> w = b.wall;
    std::sort(w.begin(), w.end());
    double sum = 0.0;
    for (double x : w) sum += x;
    const size_t m = w.size();
    const double median = m % 2 ? w[m / 2] : 0.5 * (w[m / 2 - 1] + w[m / 2]);
    out << key.first << ',' << to_string(static_cast<SolverId>(key.second)) << ',' << b.runs << ','
        << format_fixed6(sum / static_cast<double>(m)) << ',' << format_fixed6(median) << '\n';
  }
}

std::vector<SolverReport> run_benchmark_to_dir(const BenchConfig& cfg) {
  cfg.check();
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());
  std::filesystem::remove(dir / "PARTIAL", ec);

  std::vector<SolverReport> rows;
  try {
    run_rows(cfg, rows);
  } catch (const std::exception& e) {
    try {
      write_all(dir, rows);
    } catch (const std::exception&) {
    }
    std::ofstream marker(dir / "PARTIAL", std::ios::binary);
    marker << "benchmark aborted after " << rows.size() << " runs: " << e.what() << '\n';
    throw;
  }
  write_all(dir, rows);
  return rows;
}

}  // namespace evrp
