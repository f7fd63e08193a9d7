#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evrp/bench.hpp"
#include "evrp/exact.hpp"
#include "evrp/gen.hpp"
#include "evrp/meta.hpp"

namespace py = pybind11;
using namespace evrp;

namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out(static_cast<size_t>(m.size()));
  for (int r = 0; r < m.size(); ++r) {
    for (int c = 0; c < m.size(); ++c) out[static_cast<size_t>(r)].push_back(m(r, c));
  }
  return out;
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  Matrix m(n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[static_cast<size_t>(r)].size()) != n) {
      throw Error(ErrorCode::dimension_mismatch, "matrix must be square");
    }
    for (int c = 0; c < n; ++c) m(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
  }
  return m;
}

const Weights& weights_or_default(const Instance& inst, const std::optional<Weights>& w) {
  return w ? *w : inst.weights;
}

py::dict trace_dict(const std::vector<TracePoint>& trace) {
  py::list it;
  py::list best;
  for (const auto& t : trace) {
    it.append(t.iteration);
    best.append(t.best_objective);
  }
  py::dict d;
  d["iteration"] = it;
  d["best_objective"] = best;
  return d;
}

}  // namespace

PYBIND11_MODULE(_evrp, m) {
  m.doc() = "Multi-day electric vehicle route planning";

  py::register_exception<Error>(m, "EvrpError", PyExc_RuntimeError);

  py::class_<Weights>(m, "Weights")
      .def(py::init([](double wd, double wt, double wc) { return Weights::raw(wd, wt, wc); }), py::arg("wd"),
           py::arg("wt"), py::arg("wc"))
      .def_readwrite("wd", &Weights::wd)
      .def_readwrite("wt", &Weights::wt)
      .def_readwrite("wc", &Weights::wc)
      .def_readonly("prefs", &Weights::prefs)
      .def_property_readonly("bounds",
                             [](const Weights& w) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& b : w.bounds) out.emplace_back(b.lower, b.upper);
                               return out;
                             })
      .def("__repr__", [](const Weights& w) {
        return "Weights(wd=" + std::to_string(w.wd) + ", wt=" + std::to_string(w.wt) + ", wc=" + std::to_string(w.wc) +
               ")";
      });

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("size", &Instance::size)
      .def_property_readonly("event_count", &Instance::event_count)
      .def_readonly("k_min", &Instance::k_min)
      .def_readonly("k_max", &Instance::k_max)
      .def_readonly("k_start", &Instance::k_start)
      .def_readonly("separators", &Instance::separators)
      .def_readwrite("weights", &Instance::weights)
      .def_readwrite("epsilon", &Instance::epsilon)
      .def_property_readonly("kinds",
                             [](const Instance& inst) {
                               std::vector<std::string> out;
                               for (const auto& v : inst.nodes) out.emplace_back(to_string(v.kind));
                               return out;
                             })
      .def_property_readonly("dist", [](const Instance& inst) { return to_rows(inst.dist); })
      .def_property_readonly("travel", [](const Instance& inst) { return to_rows(inst.travel); })
      .def("to_json", [](const Instance& inst) { return to_json(inst); })
      .def("__eq__", [](const Instance& a, const Instance& b) { return a == b; });

  py::class_<Schedule>(m, "Schedule")
      .def(py::init<const Schedule&>(), py::arg("other"))
      .def_readwrite("order", &Schedule::order)
      .def_readwrite("arrival", &Schedule::arrival)
      .def_readwrite("charge", &Schedule::charge)
      .def_readwrite("gain", &Schedule::gain)
      .def_readwrite("range", &Schedule::range)
      .def_readwrite("objective", &Schedule::objective)
      .def_property_readonly("stop_count", &Schedule::stop_count);

  py::class_<Violation>(m, "Violation")
      .def_property_readonly("constraint", [](const Violation& v) { return std::string(to_string(v.constraint)); })
      .def_readonly("location", &Violation::location)
      .def_readonly("detail", &Violation::detail)
      .def_readonly("magnitude", &Violation::magnitude)
      .def("__repr__", [](const Violation& v) { return std::string(to_string(v.constraint)) + " at " + v.location; });

  m.def(
      "generate",
      [](std::uint64_t seed, int min_events, int max_events, int max_days, std::array<double, 3> prefs,
         double epsilon) {
        GenConfig g;
        g.seed = seed;
        g.min_events = min_events;
        g.max_events = max_events;
        g.max_days = max_days;
        g.prefs = prefs;
        g.epsilon = epsilon;
        return generate(g);
      },
      py::arg("seed"), py::arg("min_events") = 6, py::arg("max_events") = 6, py::arg("max_days") = 5,
      py::arg("prefs") = std::array<double, 3>{0.5, 0.3, 0.2}, py::arg("epsilon") = 1e-3);
  m.def("from_json", &from_json, py::arg("text"));
  m.def("to_json", &to_json, py::arg("instance"));
  m.def("load", &load, py::arg("path"));
  m.def("save", &save, py::arg("instance"), py::arg("path"));

  m.def("normalize_weights", &normalize_weights, py::arg("instance"), py::arg("prefs"));
  m.def(
      "evaluate_objective",
      [](const Schedule& s, const Instance& inst, const std::optional<Weights>& w) {
        return evaluate_objective(s, inst, weights_or_default(inst, w));
      },
      py::arg("schedule"), py::arg("instance"), py::arg("weights") = py::none());
  m.def("validate", &validate, py::arg("schedule"), py::arg("instance"));
  m.def(
      "assemble_schedule",
      [](const Route& order, const Instance& inst, const std::optional<Weights>& w) {
        return assemble_schedule(order, inst, weights_or_default(inst, w));
      },
      py::arg("order"), py::arg("instance"), py::arg("weights") = py::none());
  m.def(
      "bfd",
      [](const Instance& inst, const std::optional<Weights>& w) { return bfd_initial(inst, weights_or_default(inst, w)); },
      py::arg("instance"), py::arg("weights") = py::none());
  m.def(
      "plan_charging",
      [](const Route& route, const Instance& inst, const std::optional<Weights>& w) -> std::optional<py::dict> {
        const auto plan = plan_charging(route, inst, weights_or_default(inst, w));
        if (!plan) return std::nullopt;
        py::dict d;
        d["charge"] = plan->charge;
        d["gain"] = plan->gain;
        return d;
      },
      py::arg("route"), py::arg("instance"), py::arg("weights") = py::none());

  m.def(
      "oracle",
      [](const Instance& inst, const std::optional<Weights>& w) { return oracle(inst, weights_or_default(inst, w)); },
      py::arg("instance"), py::arg("weights") = py::none());
  m.def(
      "min_stops_for_order",
      [](const Route& order, const Instance& inst, const std::optional<Weights>& w) {
        return min_stops_for_order(order, inst, weights_or_default(inst, w));
      },
      py::arg("order"), py::arg("instance"), py::arg("weights") = py::none());
  m.def(
      "solve_exact",
      [](const Instance& inst, const std::optional<Weights>& w, double time_limit,
         std::optional<std::int64_t> node_limit, bool pruning) {
        BnBConfig cfg;
        cfg.time_limit = time_limit;
        cfg.node_limit = node_limit;
        cfg.pruning = pruning;
        const auto r = solve_exact(inst, weights_or_default(inst, w), cfg);
        py::dict d;
        d["schedule"] = r.schedule;
        d["status"] = to_string(r.status);
        d["nodes"] = r.nodes;
        py::list trace;
        for (const auto& e : r.trace) trace.append(py::make_tuple(e.node, e.objective));
        d["trace"] = trace;
        return d;
      },
      py::arg("instance"), py::arg("weights") = py::none(), py::arg("time_limit") = 15.0,
      py::arg("node_limit") = py::none(), py::arg("pruning") = true);

  m.def(
      "tabu_search",
      [](const Instance& inst, const std::optional<Weights>& w, int iterations, std::optional<int> tabu_len,
         bool aspiration) {
        TsParams p;
        p.iterations = iterations;
        p.tabu_len_swap = tabu_len;
        p.tabu_len_insert = tabu_len;
        p.aspiration = aspiration;
        const auto r = tabu_search(inst, weights_or_default(inst, w), p);
        py::dict d;
        d["schedule"] = r.schedule;
        d["trace"] = trace_dict(r.trace);
        d["tabu_len_swap"] = r.tabu_len_swap;
        d["tabu_len_insert"] = r.tabu_len_insert;
        return d;
      },
      py::arg("instance"), py::arg("weights") = py::none(), py::arg("iterations") = 500,
      py::arg("tabu_len") = py::none(), py::arg("aspiration") = false);
  m.def(
      "alns",
      [](const Instance& inst, const std::optional<Weights>& w, int iterations, std::uint64_t seed) {
        AlnsParams p;
        p.iterations = iterations;
        const auto r = alns(inst, weights_or_default(inst, w), p, seed);
        py::dict d;
        d["schedule"] = r.schedule;
        d["trace"] = trace_dict(r.trace);
        d["final_weights"] = r.final_weights;
        return d;
      },
      py::arg("instance"), py::arg("weights") = py::none(), py::arg("iterations") = 500, py::arg("seed") = 1);
  m.def(
      "aco",
      [](const Instance& inst, const std::optional<Weights>& w, int iterations, int ants, std::uint64_t seed) {
        AcoParams p;
        p.iterations = iterations;
        p.ants = ants;
        const auto r = aco(inst, weights_or_default(inst, w), p, seed);
        py::dict d;
        d["schedule"] = r.schedule;
        d["trace"] = trace_dict(r.trace);
        d["dead_ends"] = r.dead_ends;
        return d;
      },
      py::arg("instance"), py::arg("weights") = py::none(), py::arg("iterations") = 200, py::arg("ants") = 10,
      py::arg("seed") = 1);
  m.def(
      "hybrid",
      [](const Instance& inst, const std::optional<Weights>& w, double budget, std::uint64_t seed) {
        SolverOptions opt;
        opt.seed = seed;
        opt.time_limit = budget;
        const auto r = hybrid_dispatch(inst, weights_or_default(inst, w), budget, opt);
        py::dict d;
        d["schedule"] = r.schedule;
        d["status"] = r.status;
        d["engine"] = to_string(r.engine);
        d["fallback"] = r.fallback;
        return d;
      },
      py::arg("instance"), py::arg("weights") = py::none(), py::arg("budget") = 15.0, py::arg("seed") = 1);
  m.def("hybrid_choice", [](int events) { return std::string(to_string(hybrid_choice(events))); }, py::arg("events"));
  m.def(
      "default_tabu_length", [](const Instance& inst) { return default_tabu_length(inst); }, py::arg("instance"));

  m.def("aco_probabilities", &aco_probabilities, py::arg("tau"), py::arg("eta"), py::arg("alpha") = 1.0,
        py::arg("beta") = 2.0);
  m.def(
      "pheromone_update",
      [](const std::vector<std::vector<double>>& tau, const std::vector<std::pair<Route, double>>& iteration,
         std::optional<std::pair<Route, double>> best, double rho, double shift) {
        Matrix t = from_rows(tau);
        std::vector<AntSolution> sols;
        for (const auto& [route, obj] : iteration) sols.push_back({route, obj});
        std::optional<AntSolution> b;
        if (best) b = AntSolution{best->first, best->second};
        pheromone_update(t, sols, b ? &*b : nullptr, rho, shift);
        return to_rows(t);
      },
      py::arg("tau"), py::arg("iteration"), py::arg("best") = py::none(), py::arg("rho") = 0.01,
      py::arg("shift") = 0.0);

  m.def("quality", &quality, py::arg("objective"), py::arg("reference"), py::arg("shift"));
  m.def(
      "quality_shift",
      [](const Instance& inst, const std::optional<Weights>& w) { return quality_shift(inst, weights_or_default(inst, w)); },
      py::arg("instance"), py::arg("weights") = py::none());
  m.def(
      "objective_lower_bound",
      [](const Instance& inst, const std::optional<Weights>& w) {
        return objective_lower_bound(inst, weights_or_default(inst, w));
      },
      py::arg("instance"), py::arg("weights") = py::none());

  m.def(
      "linearize",
      [](const Instance& inst, const std::optional<Weights>& w) {
        const LinearModel lm = linearize(inst, weights_or_default(inst, w));
        py::list vars;
        for (const auto& v : lm.vars) {
          vars.append(py::make_tuple(v.name, v.kind == VarKind::binary ? "binary" : "continuous", v.lower, v.upper));
        }
        py::list objective;
        for (const auto& t : lm.objective) objective.append(py::make_tuple(t.var, t.coef));
        py::list rows;
        for (const auto& r : lm.rows) {
          py::list terms;
          for (const auto& t : r.terms) terms.append(py::make_tuple(t.var, t.coef));
          const char* sense = r.sense == Sense::le ? "<=" : r.sense == Sense::ge ? ">=" : "=";
          rows.append(py::make_tuple(r.name, terms, sense, r.rhs));
        }
        py::dict d;
        d["vars"] = vars;
        d["objective"] = objective;
        d["objective_constant"] = lm.objective_constant;
        d["rows"] = rows;
        d["m_time"] = lm.m_time;
        d["m_range"] = lm.m_range;
        d["lp"] = to_lp(lm);
        return d;
      },
      py::arg("instance"), py::arg("weights") = py::none());
}
