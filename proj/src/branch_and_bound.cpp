#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "evrp/exact.hpp"

namespace evrp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::time_limit: return "timeLimit";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::heuristic_leaf: return "heuristicLeaf";
  }
  return "?";
}

void BnBConfig::check() const {
  if (!(time_limit > 0.0)) throw Error(ErrorCode::invalid_argument, "BnBConfig: timeLimit must be > 0");
  if (node_limit && *node_limit < 1) throw Error(ErrorCode::invalid_argument, "BnBConfig: nodeLimit must be >= 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Search {
 public:
  Search(const Instance& inst, const Weights& w, const BnBConfig& cfg, Route skeleton, std::vector<NodeId> missing)
      : inst_(inst), w_(w), cfg_(cfg), skeleton_(std::move(skeleton)), clock_(inst) {
    const int n = inst.size();
    const auto nn = static_cast<size_t>(n);
    in_missing_.assign(nn, 0);
    for (NodeId u : missing) in_missing_[static_cast<size_t>(u)] = 1;
    used_.assign(nn, 0);

    min_out_.assign(nn, 0.0);
    min_in_travel_.assign(nn, 0.0);
    for (NodeId u = 0; u < n; ++u) {
      double out = kInf;
      double in = kInf;
      for (NodeId v = 0; v < n; ++v) {
        if (v == u) continue;
        if (v != 0) out = std::min(out, inst.dist(u, v));
        if (v != n - 1) in = std::min(in, inst.travel(v, u));
      }
      min_out_[static_cast<size_t>(u)] = std::isfinite(out) ? out : 0.0;
      min_in_travel_[static_cast<size_t>(u)] = std::isfinite(in) ? in : 0.0;
    }
    for (NodeId u = 0; u < n - 1; ++u) {
      if (inst.node(u).chargeable()) ++chargeable_;
    }
    const auto& start = inst.node(0);
    a0_floor_ = start.a_min - start.walk_time();
  }

  BnBResult run(std::optional<Schedule> seed) {
    started_ = std::chrono::steady_clock::now();
    if (seed) offer(std::move(*seed));
    if (!cfg_.pruning || clock_.start_feasible()) {
      route_.push_back(0);
      used_[0] = 1;
      skel_pos_ = 1;
      chain_pos_ = 1;
      k_max_at_last_ = inst_.k_start;
      remaining_min_out_ = 0.0;
      for (NodeId u = 1; u < inst_.end_node(); ++u) remaining_min_out_ += min_out_[static_cast<size_t>(u)];
      dfs();
    }

    BnBResult out;
    out.nodes = nodes_;
    out.trace = std::move(trace_);
    out.schedule = std::move(best_);
    if (stopped_) {
      out.status = SolveStatus::time_limit;
    } else if (!out.schedule) {
      out.status = SolveStatus::infeasible;
    } else {
      out.status = heuristic_leaf_ ? SolveStatus::heuristic_leaf : SolveStatus::optimal;
    }
    return out;
  }

 private:
  void offer(Schedule s) {
    if (best_ && !(s.objective < best_->objective - 1e-12)) return;
    trace_.push_back({nodes_, s.objective});
    best_ = std::move(s);
  }

  bool out_of_budget() {
    if (stopped_) return true;
    if (cfg_.node_limit && nodes_ >= *cfg_.node_limit) stopped_ = true;
    if ((nodes_ & 1023) == 0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started_;
      if (elapsed.count() > cfg_.time_limit) stopped_ = true;
    }
    return stopped_;
  }

  // Lower bound on the objective of every completion of the current prefix.
  double bound() const {
    const NodeId last = route_.back();
    const double dist_lb = prefix_dist_ + (last == inst_.end_node() ? 0.0 : min_out_[static_cast<size_t>(last)]) +
                           remaining_min_out_;
    double value = w_.wd * dist_lb + inst_.epsilon * a0_floor_;

    if (w_.wt > 0.0 && !inst_.separators.empty()) {
      double days = day_lb_placed_;
      for (size_t k = seps_placed_; k < inst_.separators.size(); ++k) {
        const NodeId s = inst_.separators[k];
        days += min_in_travel_[static_cast<size_t>(s)];
        if (k == 0) days += busy_;
      }
      value += w_.wt * days;
    }
    if (w_.wc > 0.0) {
      double gains = 0.0;
      for (NodeId u = 0; u < inst_.end_node(); ++u) {
        if ((!used_[static_cast<size_t>(u)] || u == last) && inst_.node(u).chargeable()) gains += inst_.node(u).max_gain();
      }
      const double rest = dist_lb - prefix_dist_;
      const double k_end = std::min(inst_.k_max, k_max_at_last_ + gains - rest);
      value -= w_.wc * k_end;
    }
    return value;
  }

  std::vector<NodeId> candidates() const {
    const int n = inst_.size();
    std::vector<NodeId> out;
    const bool only_end_left = static_cast<int>(route_.size()) == n - 1;
    for (NodeId v = 1; v < n; ++v) {
      if (used_[static_cast<size_t>(v)]) continue;
      if (v == n - 1 && !only_end_left) continue;
      const bool skel_next = skel_pos_ < skeleton_.size() && skeleton_[skel_pos_] == v;
      if (!skel_next && !in_missing_[static_cast<size_t>(v)]) continue;
      if (cfg_.pruning && inst_.node(v).kind != NodeKind::flexible) {
        if (chain_pos_ >= inst_.chain.size() || inst_.chain[chain_pos_] != v) continue;
      }
      out.push_back(v);
    }
    const NodeId last = route_.back();
    std::stable_sort(out.begin(), out.end(),
                     [&](NodeId a, NodeId b) { return inst_.dist(last, a) < inst_.dist(last, b); });
    return out;
  }

  void leaf() {
    if (cfg_.pruning && best_ && bound() >= best_->objective - 1e-12) return;
    std::optional<RouteEval> e;
    if (chargeable_ <= kLeafEnumerationMaxChargeable) {
      e = best_charges_for_route(route_, inst_, w_);
    } else {
      heuristic_leaf_ = true;
      e = evaluate_route(route_, inst_, w_);
    }
    if (e) offer(to_schedule(*e, inst_));
  }

  void dfs() {
    if (route_.size() == static_cast<size_t>(inst_.size())) {
      leaf();
      return;
    }
    for (NodeId v : candidates()) {
      if (out_of_budget()) return;
      ++nodes_;
      std::optional<double> a;
      if (cfg_.pruning) {
        a = clock_.try_visit(v);
        if (!a) continue;
        if (inst_.node(v).kind == NodeKind::flexible && chain_pos_ < inst_.chain.size() &&
            !clock_.reachable_after(v, *a, inst_.chain[chain_pos_])) {
          continue;
        }
        if (clock_.strands_free(v, *a, used_)) continue;
      }
      descend(v, a.value_or(0.0));
    }
  }

  void descend(NodeId v, double arrival) {
    const NodeId u = route_.back();
    const auto vv = static_cast<size_t>(v);
    const auto& node_u = inst_.node(u);

    // Save state.
    const double saved_dist = prefix_dist_;
    const double saved_k = k_max_at_last_;
    const double saved_busy = busy_;
    const double saved_days = day_lb_placed_;
    const double saved_rem = remaining_min_out_;
    const size_t saved_seps = seps_placed_;
    const size_t saved_skel = skel_pos_;
    const size_t saved_chain = chain_pos_;

    prefix_dist_ += inst_.dist(u, v);
    const double after_charge =
        node_u.chargeable() ? std::min(inst_.k_max, k_max_at_last_ + node_u.max_gain()) : k_max_at_last_;
    k_max_at_last_ = after_charge - inst_.dist(u, v);
    if (v != inst_.end_node()) remaining_min_out_ -= min_out_[vv];
    if (skel_pos_ < skeleton_.size() && skeleton_[skel_pos_] == v) ++skel_pos_;
    if (inst_.node(v).kind != NodeKind::flexible) ++chain_pos_;

    const int sep = inst_.separator_pos[vv];
    if (seps_placed_ == 0) {
      busy_ += node_u.duration + inst_.travel(u, v);
    }
    if (sep >= 0) {
      if (sep == 0) {
        day_lb_placed_ += busy_;
      } else if (cfg_.pruning) {
        day_lb_placed_ += arrival - inst_.node(inst_.separators[static_cast<size_t>(sep - 1)]).a_max;
      }
      ++seps_placed_;
    }

    route_.push_back(v);
    used_[vv] = 1;
    if (cfg_.pruning) clock_.push(v, arrival);

    const bool range_ok = !cfg_.pruning || k_max_at_last_ >= inst_.k_min - kRangeTol;
    if (range_ok && (!cfg_.pruning || !best_ || bound() < best_->objective - 1e-12)) dfs();

    if (cfg_.pruning) clock_.pop();
    used_[vv] = 0;
    route_.pop_back();
    prefix_dist_ = saved_dist;
    k_max_at_last_ = saved_k;
    busy_ = saved_busy;
    day_lb_placed_ = saved_days;
    remaining_min_out_ = saved_rem;
    seps_placed_ = saved_seps;
    skel_pos_ = saved_skel;
    chain_pos_ = saved_chain;
  }

  const Instance& inst_;
  const Weights& w_;
  const BnBConfig& cfg_;
  Route skeleton_;
  std::vector<char> in_missing_;
  std::vector<double> min_out_;
  std::vector<double> min_in_travel_;
  int chargeable_ = 0;
  double a0_floor_ = 0.0;

  ForwardClock clock_;
  Route route_;
  std::vector<char> used_;
  size_t skel_pos_ = 0;
  size_t chain_pos_ = 0;
  double prefix_dist_ = 0.0;
  double k_max_at_last_ = 0.0;  // range on arrival when charging everywhere
  double remaining_min_out_ = 0.0;
  double busy_ = 0.0;           // durations and travel before the first separator
  double day_lb_placed_ = 0.0;
  size_t seps_placed_ = 0;

  std::int64_t nodes_ = 0;
  bool stopped_ = false;
  bool heuristic_leaf_ = false;
  std::chrono::steady_clock::time_point started_;
  std::optional<Schedule> best_;
  std::vector<IncumbentEvent> trace_;
};

std::optional<Schedule> checked_seed(const Schedule& s, const Instance& inst, const Weights& w) {
  if (s.order.size() != static_cast<size_t>(inst.size()) || !validate(s, inst).empty()) return std::nullopt;
  Schedule out = s;
  out.objective = evaluate_objective(s, inst, w);
  return out;
}

}  // namespace

BnBResult solve_exact(const Instance& inst, const Weights& w, const BnBConfig& cfg) {
  cfg.check();
  std::optional<Schedule> seed;
  if (cfg.incumbent_seed) seed = checked_seed(*cfg.incumbent_seed, inst, w);
  if (cfg.seed_with_bfd) {
    try {
      Schedule s = bfd_initial(inst, w);
      if (!seed || s.objective < seed->objective) seed = std::move(s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_initial_solution) throw;
    }
  }
  Search search(inst, w, cfg, inst.chain, inst.free_nodes);
  return search.run(std::move(seed));
}

BnBResult complete_exact(const Instance& inst, const Weights& w, const Route& skeleton,
                         const std::vector<NodeId>& missing, const BnBConfig& cfg) {
  cfg.check();
  if (skeleton.empty() || skeleton.front() != 0) {
    throw Error(ErrorCode::invalid_argument, "skeleton must start at node 0");
  }
  if (skeleton.size() + missing.size() != static_cast<size_t>(inst.size())) {
    throw Error(ErrorCode::invalid_argument, "skeleton and missing nodes must cover the instance");
  }
  std::optional<Schedule> seed;
  if (cfg.incumbent_seed) seed = checked_seed(*cfg.incumbent_seed, inst, w);
  Search search(inst, w, cfg, skeleton, missing);
  return search.run(std::move(seed));
}

}  // namespace evrp
