// evrp: generate instances, solve them, run benchmarks and emit the
// linear model.
//
// Exit codes: 0 success, 1 infeasible, 2 usage error, 3 internal error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "evrp/bench.hpp"
#include "evrp/exact.hpp"
#include "evrp/gen.hpp"

namespace {

using namespace evrp;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return x;
}

std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError("not a non-negative integer: '" + s + "'");
  }
  return std::stoull(s);
}

// "1-5,9" -> 1 2 3 4 5 9
std::vector<std::uint64_t> parse_ranges(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& tok : split(s, ',')) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_u64(tok));
      continue;
    }
    const auto lo = to_u64(tok.substr(0, dash));
    const auto hi = to_u64(tok.substr(dash + 1));
    if (hi < lo || hi - lo > 1000000) throw UsageError("bad range '" + tok + "'");
    for (auto x = lo; x <= hi; ++x) out.push_back(x);
  }
  if (out.empty()) throw UsageError("empty list '" + s + "'");
  return out;
}

std::array<double, 3> parse_prefs(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw UsageError("--weights needs three values wd,wt,wc");
  std::array<double, 3> p{to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
  const double sum = p[0] + p[1] + p[2];
  if (!(p[0] >= 0.0 && p[1] >= 0.0 && p[2] >= 0.0) || !(sum > 0.0)) {
    throw UsageError("--weights must be non-negative with a positive sum");
  }
  for (double& x : p) x /= sum;
  return p;
}

struct InstanceArgs {
  std::string path;
  std::uint64_t gen_seed = 1;
  int events = 0;
  int max_days = 5;
  std::string weights;
  std::optional<double> epsilon;

  void add(CLI::App* app) {
    app->add_option("-i,--instance", path, "instance JSON file");
    app->add_option("--gen-seed", gen_seed, "generate the instance from this seed instead of reading a file");
    app->add_option("--events", events, "event count of the generated instance");
    app->add_option("--max-days", max_days, "day limit of the generated instance");
    app->add_option("--weights", weights, "preferences wd,wt,wc (normalized against the instance)");
    app->add_option("--epsilon", epsilon, "weight of the stop count and start time terms");
  }

  Instance load_instance() const {
    Instance inst;
    if (!path.empty()) {
      inst = load(path);
    } else if (events > 0) {
      GenConfig g;
      g.seed = gen_seed;
      g.min_events = events;
      g.max_events = events;
      g.max_days = max_days;
      inst = generate(g);
    } else {
      throw UsageError("give --instance FILE or --events N (with --gen-seed)");
    }
    if (epsilon) {
      if (!(*epsilon >= 0.0 && *epsilon <= 1.0)) throw UsageError("--epsilon must lie in [0, 1]");
      inst.epsilon = *epsilon;
    }
    if (!weights.empty()) inst.weights = normalize_weights(inst, parse_prefs(weights));
    return inst;
  }
};

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::io_error, "cannot write " + path);
  return file;
}

struct Summands {
  double distance = 0.0;
  double day_time = 0.0;
};

Summands summands(const Schedule& s, const Instance& inst) {
  Summands out;
  for (size_t i = 0; i + 1 < s.order.size(); ++i) out.distance += inst.dist(s.order[i], s.order[i + 1]);
  for (NodeId u : inst.separators) out.day_time += s.arrival[static_cast<size_t>(u)] - separator_ref(u, s.arrival, inst);
  return out;
}

int cmd_gen(std::uint64_t seed, int count, int min_events, int max_events, int max_days, const std::string& out_dir,
            const std::string& weights, double epsilon) {
  if (count < 1) throw UsageError("--count must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + out_dir);
  for (int k = 0; k < count; ++k) {
    GenConfig g;
    g.seed = seed + static_cast<std::uint64_t>(k);
    g.min_events = min_events;
    g.max_events = max_events;
    g.max_days = max_days;
    g.epsilon = epsilon;
    if (!weights.empty()) g.prefs = parse_prefs(weights);
    const Instance inst = generate(g);
    const auto path = std::filesystem::path(out_dir) / ("instance_" + std::to_string(g.seed) + ".json");
    save(inst, path.string());
    std::cout << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_solve(const InstanceArgs& ia, const std::string& solver, const SolverOptions& opt, const std::string& out,
              const std::string& schedule_out) {
  const Instance inst = ia.load_instance();
  const SolverId id = solver_from_string(solver);
  const auto t0 = std::chrono::steady_clock::now();
  const SolveOutcome r = run_solver(id, inst, inst.weights, opt);
  const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;

  std::ofstream file;
  std::ostream& os = open_out(out, file);
  os << "solver,engine,status,events,nodes,objective,distance,day_time,end_range,stops,start_time\n";
  os << to_string(id) << ',' << to_string(r.engine) << (r.fallback ? "+fallback" : "") << ',' << r.status << ','
     << inst.event_count() << ',' << inst.size() << ',';
  if (r.schedule) {
    const auto& s = *r.schedule;
    const Summands sm = summands(s, inst);
    os << format_fixed6(s.objective) << ',' << format_fixed6(sm.distance) << ',' << format_fixed6(sm.day_time) << ','
       << format_fixed6(s.range[static_cast<size_t>(inst.end_node())]) << ',' << s.stop_count() << ','
       << format_fixed6(s.arrival[0]) << '\n';
  } else {
    os << ",,,,,\n";
  }
  std::cerr << "solve: " << to_string(id) << " status " << r.status << " in " << format_fixed6(dt.count()) << " ms\n";

  if (r.schedule && !schedule_out.empty()) {
    std::ofstream sf;
    std::ostream& ss = open_out(schedule_out, sf);
    const auto& s = *r.schedule;
    ss << "position,node,kind,arrival,charge,gain,range\n";
    for (size_t p = 0; p < s.order.size(); ++p) {
      const auto u = static_cast<size_t>(s.order[p]);
      ss << p << ',' << s.order[p] << ',' << to_string(inst.node(s.order[p]).kind) << ',' << format_fixed6(s.arrival[u])
         << ',' << static_cast<int>(s.charge[u]) << ',' << format_fixed6(s.gain[u]) << ',' << format_fixed6(s.range[u])
         << '\n';
    }
  }
  if (!r.schedule) return kExitInfeasible;
  const auto violations = validate(*r.schedule, inst);
  if (!violations.empty()) {
    std::cerr << "internal error: schedule violates " << to_string(violations.front().constraint) << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

int cmd_bench(const std::string& seeds, const std::string& sizes, const std::string& solvers, const std::string& out,
              double time_limit, std::optional<std::int64_t> node_limit, int max_days) {
  BenchConfig cfg = BenchConfig::defaults();
  if (!seeds.empty()) cfg.seeds = parse_ranges(seeds);
  if (!sizes.empty()) {
    cfg.sizes.clear();
    for (auto x : parse_ranges(sizes)) cfg.sizes.push_back(static_cast<int>(x));
  }
  if (solvers != "default") {
    cfg.solvers.clear();
    for (const auto& s : split(solvers, ',')) cfg.solvers.push_back(solver_from_string(s));
  }
  cfg.out_dir = out;
  cfg.per_run_time_limit = time_limit;
  cfg.node_limit = node_limit;
  cfg.max_days = max_days;
  const auto rows = run_benchmark_to_dir(cfg);
  std::cerr << "bench: " << rows.size() << " runs written to " << out << '\n';
  return kExitOk;
}

int cmd_lp(const InstanceArgs& ia, const std::string& out) {
  const Instance inst = ia.load_instance();
  const LinearModel m = linearize(inst, inst.weights);
  std::ofstream file;
  open_out(out, file) << to_lp(m);
  return kExitOk;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::parse_error:
    case ErrorCode::unsupported_version:
    case ErrorCode::too_large:
    case ErrorCode::io_error:
      return kExitUsage;
    case ErrorCode::no_initial_solution:
    case ErrorCode::no_solution_found:
      return kExitInfeasible;
    case ErrorCode::generation_failed:
      return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-day electric vehicle route planning"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write generated instance files");
  std::uint64_t gen_seed = 1;
  int gen_count = 1;
  int gen_min = 6;
  int gen_max = 6;
  int gen_days = 5;
  std::string gen_out = ".";
  std::string gen_weights;
  double gen_epsilon = 1e-3;
  gen->add_option("--seed", gen_seed, "first seed");
  gen->add_option("--count", gen_count, "number of instances (consecutive seeds)");
  gen->add_option("--min-events", gen_min, "minimum event count");
  gen->add_option("--max-events", gen_max, "maximum event count");
  gen->add_option("--max-days", gen_days, "maximum number of days");
  gen->add_option("--weights", gen_weights, "preferences wd,wt,wc");
  gen->add_option("--epsilon", gen_epsilon, "epsilon weight");
  gen->add_option("-o,--out", gen_out, "output directory");

  auto* solve = app.add_subcommand("solve", "solve one instance and print a report");
  InstanceArgs solve_inst;
  solve_inst.add(solve);
  std::string solver = "hybrid";
  SolverOptions opt;
  std::optional<std::int64_t> solve_nodes;
  std::string solve_out;
  std::string schedule_out;
  solve->add_option("--solver", solver, "exact, ts, alns, aco, hybrid, bfd or oracle");
  solve->add_option("--time-limit", opt.time_limit, "seconds");
  solve->add_option("--seed", opt.seed, "solver seed");
  solve->add_option("--node-limit", solve_nodes, "branch-and-bound node limit");
  solve->add_option("-o,--out", solve_out, "report CSV (default stdout)");
  solve->add_option("--schedule", schedule_out, "per-node schedule CSV");

  auto* bench = app.add_subcommand("bench", "run the benchmark ensemble");
  std::string bench_seeds;
  std::string bench_sizes;
  std::string bench_solvers = "default";
  std::string bench_out = "bench-out";
  double bench_limit = 15.0;
  std::optional<std::int64_t> bench_nodes;
  int bench_days = 5;
  bench->add_option("--seeds", bench_seeds, "seed list, e.g. 1-100 or 1,5,9");
  bench->add_option("--sizes", bench_sizes, "event counts, e.g. 5,10,20");
  bench->add_option("--solvers", bench_solvers, "comma-separated solver names");
  bench->add_option("--out", bench_out, "output directory");
  bench->add_option("--time-limit", bench_limit, "seconds per run");
  bench->add_option("--node-limit", bench_nodes, "branch-and-bound node limit");
  bench->add_option("--max-days", bench_days, "maximum number of days per instance");

  auto* lp = app.add_subcommand("lp", "write the linear model in LP format");
  InstanceArgs lp_inst;
  lp_inst.add(lp);
  std::string lp_out;
  lp->add_option("-o,--out", lp_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_seed, gen_count, gen_min, gen_max, gen_days, gen_out, gen_weights, gen_epsilon);
    if (*solve) {
      opt.node_limit = solve_nodes;
      if (!(opt.time_limit > 0.0)) throw UsageError("--time-limit must be > 0");
      return cmd_solve(solve_inst, solver, opt, solve_out, schedule_out);
    }
    if (*bench) return cmd_bench(bench_seeds, bench_sizes, bench_solvers, bench_out, bench_limit, bench_nodes, bench_days);
    if (*lp) return cmd_lp(lp_inst, lp_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
