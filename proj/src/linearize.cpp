#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "evrp/exact.hpp"

namespace evrp {

int LinearModel::find(const std::string& name) const {
  for (size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::string id2(const char* prefix, int u, int v) {
  return std::string(prefix) + "_" + std::to_string(u) + "_" + std::to_string(v);
}

std::string id1(const char* prefix, int u) { return std::string(prefix) + "_" + std::to_string(u); }

class Builder {
 public:
  explicit Builder(LinearModel& m) : m_(m) {}

  int var(std::string name, VarKind kind, double lo, double hi) {
    m_.vars.push_back({std::move(name), kind, lo, hi});
    return static_cast<int>(m_.vars.size()) - 1;
  }

  void row(std::string name, std::vector<Term> terms, Sense sense, double rhs, double big_m = 0.0) {
    terms.erase(std::remove_if(terms.begin(), terms.end(), [](const Term& t) { return t.var < 0 || t.coef == 0.0; }),
                terms.end());
    if (terms.empty()) return;
    m_.rows.push_back({std::move(name), std::move(terms), sense, rhs, big_m});
  }

 private:
  LinearModel& m_;
};

}  // namespace

LinearModel linearize(const Instance& inst, const Weights& w) {
  const int n = inst.size();
  LinearModel m;
  Builder b(m);

  double lo_time = 0.0;
  double hi_time = 0.0;
  double max_d = 0.0;
  double max_t = 0.0;
  double max_dur = 0.0;
  double max_walk = 0.0;
  for (NodeId u = 0; u < n; ++u) {
    const auto& node = inst.node(u);
    const double lo = std::min(node.a_min, node.fixed_arrival.value_or(node.a_min)) - node.walk_time();
    lo_time = u == 0 ? lo : std::min(lo_time, lo);
    hi_time = u == 0 ? node.a_max : std::max(hi_time, node.a_max);
    max_dur = std::max(max_dur, node.duration);
    max_walk = std::max(max_walk, node.walk_time());
    for (NodeId v = 0; v < n; ++v) {
      max_d = std::max(max_d, inst.dist(u, v));
      max_t = std::max(max_t, inst.travel(u, v));
    }
  }
  lo_time = std::max(0.0, lo_time);
  m.m_time = (hi_time - lo_time) + max_dur + max_t + 2.0 * max_walk;
  m.m_range = inst.k_max + max_d;

  std::vector<int> a(static_cast<size_t>(n));
  std::vector<int> k(static_cast<size_t>(n));
  std::vector<int> ct(static_cast<size_t>(n), -1);
  std::vector<int> r(static_cast<size_t>(n), -1);
  for (NodeId u = 0; u < n; ++u) a[static_cast<size_t>(u)] = b.var(id1("a", u), VarKind::continuous, lo_time, hi_time);
  for (NodeId u = 0; u < n; ++u) k[static_cast<size_t>(u)] = b.var(id1("k", u), VarKind::continuous, 0.0, inst.k_max);
  for (NodeId u = 0; u < n - 1; ++u) {
    const double cap = std::min(inst.node(u).max_gain(), inst.k_max);
    ct[static_cast<size_t>(u)] = b.var(id1("ct", u), VarKind::continuous, 0.0, cap);
  }
  for (NodeId u = 0; u < n; ++u) {
    const double hi = u < n - 1 && inst.node(u).chargeable() ? 1.0 : 0.0;
    r[static_cast<size_t>(u)] = b.var(id1("r", u), VarKind::binary, 0.0, hi);
  }
  // Edges out of the end node and into the start node can never be used.
  Matrix xi(n, -1.0);
  for (NodeId u = 0; u < n - 1; ++u) {
    for (NodeId v = 1; v < n; ++v) {
      if (u != v) xi(u, v) = b.var(id2("x", u, v), VarKind::binary, 0.0, 1.0);
    }
  }
  auto x = [&](NodeId u, NodeId v) { return static_cast<int>(xi(u, v)); };
  auto A = [&](NodeId u) { return a[static_cast<size_t>(u)]; };
  auto K = [&](NodeId u) { return k[static_cast<size_t>(u)]; };
  auto R = [&](NodeId u) { return r[static_cast<size_t>(u)]; };
  auto CT = [&](NodeId u) { return ct[static_cast<size_t>(u)]; };

  // Objective.
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (x(u, v) >= 0 && inst.dist(u, v) != 0.0) m.objective.push_back({x(u, v), w.wd * inst.dist(u, v)});
    }
  }
  for (size_t i = 0; i < inst.separators.size(); ++i) {
    const NodeId s = inst.separators[i];
    m.objective.push_back({A(s), w.wt});
    if (i == 0) {
      m.objective.push_back({A(0), -w.wt});
    } else {
      m.objective_constant -= w.wt * inst.node(inst.separators[i - 1]).a_max;
    }
  }
  if (w.wc != 0.0) m.objective.push_back({K(n - 1), -w.wc});
  for (NodeId u = 0; u < n - 1; ++u) {
    if (inst.node(u).chargeable()) m.objective.push_back({R(u), inst.epsilon});
  }
  m.objective.push_back({A(0), inst.epsilon});
  // Merge duplicate objective entries (a_0 may appear twice).
  std::vector<Term> merged;
  for (const Term& t : m.objective) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Term& o) { return o.var == t.var; });
    if (it == merged.end()) {
      merged.push_back(t);
    } else {
      it->coef += t.coef;
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Term& t) { return t.coef == 0.0; }), merged.end());
  m.objective = std::move(merged);

  // Flow.
  for (NodeId u = 0; u < n - 1; ++u) {
    std::vector<Term> t;
    for (NodeId v = 1; v < n; ++v) t.push_back({x(u, v), 1.0});
    b.row(id1("flow_out", u), std::move(t), Sense::eq, 1.0);
  }
  for (NodeId v = 1; v < n; ++v) {
    std::vector<Term> t;
    for (NodeId u = 0; u < n - 1; ++u) t.push_back({x(u, v), 1.0});
    b.row(id1("flow_in", v), std::move(t), Sense::eq, 1.0);
  }
  for (NodeId u = 1; u < n - 1; ++u) {
    for (NodeId v = u + 1; v < n - 1; ++v) {
      b.row(id2("two_cycle", u, v), {{x(u, v), 1.0}, {x(v, u), 1.0}}, Sense::le, 1.0);
    }
  }

  // Time windows.
  for (NodeId u = 0; u < n; ++u) {
    const auto& node = inst.node(u);
    const double walk = node.walk_time();
    if (node.fixed_arrival) {
      b.row(id1("fixed", u), {{A(u), 1.0}, {R(u), walk}}, Sense::eq, *node.fixed_arrival);
      continue;
    }
    const int sep = inst.separator_pos[static_cast<size_t>(u)];
    if (sep < 0) {
      b.row(id1("window_lo", u), {{A(u), 1.0}, {R(u), walk}}, Sense::ge, node.a_min);
    } else if (sep == 0) {
      b.row(id1("sep_lo", u), {{A(u), 1.0}, {A(0), -1.0}, {R(u), -walk}}, Sense::ge, 0.0);
    } else {
      const double ref = inst.node(inst.separators[static_cast<size_t>(sep - 1)]).a_max;
      b.row(id1("sep_lo", u), {{A(u), 1.0}, {R(u), -walk}}, Sense::ge, ref);
    }
    b.row(id1(sep < 0 ? "window_hi" : "sep_hi", u), {{A(u), 1.0}, {R(u), walk}}, Sense::le, node.a_max - node.duration);
  }

  // Time chaining, written as a_v - (departure terms) - M x_uv >= const - M.
  const double mt = m.m_time;
  for (NodeId u = 0; u < n - 1; ++u) {
    const auto& node = inst.node(u);
    const bool sep = inst.separator_pos[static_cast<size_t>(u)] >= 0;
    for (NodeId v = 1; v < n; ++v) {
      if (x(u, v) < 0) continue;
      if (sep) {
        b.row(id2("time", u, v), {{A(v), 1.0}, {R(u), -node.walk_time()}, {x(u, v), -mt}}, Sense::ge,
              node.a_max + inst.travel(u, v) - mt, mt);
      } else {
        b.row(id2("time", u, v), {{A(v), 1.0}, {A(u), -1.0}, {R(u), -2.0 * node.walk_time()}, {x(u, v), -mt}},
              Sense::ge, node.duration + inst.travel(u, v) - mt, mt);
      }
    }
  }

  // Battery.
  b.row("end_charge", {{R(n - 1), 1.0}}, Sense::eq, 0.0);
  b.row("start_range", {{K(0), 1.0}}, Sense::eq, inst.k_start);
  for (NodeId u = 0; u < n; ++u) b.row(id1("min_range", u), {{K(u), 1.0}}, Sense::ge, inst.k_min);
  for (NodeId u = 0; u < n - 1; ++u) {
    const double cap = std::min(inst.node(u).max_gain(), inst.k_max);
    b.row(id1("gain_cap", u), {{CT(u), 1.0}, {R(u), -cap}}, Sense::le, 0.0);
    b.row(id1("max_range", u), {{K(u), 1.0}, {CT(u), 1.0}}, Sense::le, inst.k_max);
  }
  const double mk = m.m_range;
  for (NodeId u = 0; u < n - 1; ++u) {
    for (NodeId v = 1; v < n; ++v) {
      if (x(u, v) < 0) continue;
      const double d = inst.dist(u, v);
      b.row(id2("range_hi", u, v), {{K(v), 1.0}, {K(u), -1.0}, {CT(u), -1.0}, {x(u, v), mk}}, Sense::le, mk - d, mk);
      b.row(id2("range_lo", u, v), {{K(v), 1.0}, {K(u), -1.0}, {CT(u), -1.0}, {x(u, v), -mk}}, Sense::ge, -d - mk,
            mk);
    }
  }
  return m;
}

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_terms(std::ostringstream& out, const LinearModel& m, const std::vector<Term>& terms) {
  bool first = true;
  for (const Term& t : terms) {
    const double c = t.coef;
    if (first) {
      if (c < 0) out << "- ";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    const double mag = std::abs(c);
    if (mag != 1.0) out << fmt(mag) << ' ';
    out << m.vars[static_cast<size_t>(t.var)].name;
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

std::string to_lp(const LinearModel& m) {
  std::ostringstream out;
  out << "\\ evrp multi-day model\n";
  out << "\\ M_time " << fmt(m.m_time) << "\n";
  out << "\\ M_range " << fmt(m.m_range) << "\n";
  out << "\\ objective constant " << fmt(m.objective_constant) << "\n";
  out << "Minimize\n obj: ";
  write_terms(out, m, m.objective);
  out << "\nSubject To\n";
  for (const Row& row : m.rows) {
    out << ' ' << row.name << ": ";
    write_terms(out, m, row.terms);
    out << (row.sense == Sense::le ? " <= " : row.sense == Sense::ge ? " >= " : " = ") << fmt(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const Variable& v : m.vars) {
    if (v.kind == VarKind::binary && v.upper == 1.0) continue;
    out << ' ' << fmt(v.lower) << " <= " << v.name << " <= " << fmt(v.upper) << '\n';
  }
  out << "Binaries\n";
  for (const Variable& v : m.vars) {
    if (v.kind == VarKind::binary) out << ' ' << v.name << '\n';
  }
  out << "End\n";
  return out.str();
}

}  // namespace evrp
