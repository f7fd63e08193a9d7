#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>

#include "evrp/meta.hpp"
#include "route_cache.hpp"

namespace evrp {

Route apply_move(const Route& route, const Move& m) {
  Route out = route;
  const auto i = static_cast<size_t>(m.i);
  const auto j = static_cast<size_t>(m.j);
  if (m.kind == MoveKind::swap) {
    std::swap(out[i], out[j]);
  } else {
    const NodeId v = out[i];
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(j), v);
  }
  return out;
}

std::vector<Move> neighborhood(const Route& route, const Instance& inst) {
  std::vector<Move> out;
  const int last = static_cast<int>(route.size()) - 2;
  for (int i = 1; i <= last; ++i) {
    for (int j = i + 1; j <= last; ++j) {
      const Move m{MoveKind::swap, i, j};
      if (respects_chain(apply_move(route, m), inst)) out.push_back(m);
    }
  }
  // Inserts to a neighbouring position duplicate a swap.
  for (int i = 1; i <= last; ++i) {
    for (int j = 1; j <= last; ++j) {
      if (std::abs(i - j) <= 1) continue;
      const Move m{MoveKind::insert, i, j};
      if (respects_chain(apply_move(route, m), inst)) out.push_back(m);
    }
  }
  return out;
}

int default_tabu_length(const Instance& inst) { return (inst.event_count() + 1) / 2; }

void TsParams::check() const {
  if ((tabu_len_swap && *tabu_len_swap < 0) || (tabu_len_insert && *tabu_len_insert < 0)) {
    throw Error(ErrorCode::invalid_argument, "TsParams: tabu lengths must be >= 0");
  }
  if (iterations < 0) throw Error(ErrorCode::invalid_argument, "TsParams: iterations must be >= 0");
  if (time_limit && !(*time_limit > 0.0)) throw Error(ErrorCode::invalid_argument, "TsParams: timeLimit must be > 0");
}

namespace {

template <typename T>
class TabuList {
 public:
  explicit TabuList(int length) : length_(static_cast<size_t>(length)) {}

  bool contains(const T& x) const { return std::find(items_.begin(), items_.end(), x) != items_.end(); }

  void push(const T& x) {
    if (length_ == 0) return;
    items_.push_back(x);
    if (items_.size() > length_) items_.pop_front();
  }

 private:
  size_t length_;
  std::deque<T> items_;
};

}  // namespace

TsResult tabu_search(const Instance& inst, const Weights& w, const TsParams& p, std::uint64_t /*seed*/) {
  p.check();
  TsResult out;
  out.tabu_len_swap = p.tabu_len_swap.value_or(default_tabu_length(inst));
  out.tabu_len_insert = p.tabu_len_insert.value_or(default_tabu_length(inst));
  const Deadline deadline(p.time_limit);

  const Schedule initial = bfd_initial(inst, w);
  RouteCache cache(inst, w);
  Route current = initial.order;
  Route best = current;
  double best_obj = initial.objective;

  TabuList<std::pair<NodeId, NodeId>> swaps(out.tabu_len_swap);
  TabuList<std::pair<NodeId, int>> inserts(out.tabu_len_insert);

  for (int it = 0; it < p.iterations; ++it) {
    if (deadline.passed()) {
      out.time_limited = true;
      break;
    }
    std::optional<Move> chosen;
    double chosen_obj = 0.0;
    bool chosen_tabu = false;
    for (const Move& m : neighborhood(current, inst)) {
      const NodeId a = current[static_cast<size_t>(m.i)];
      const NodeId b = current[static_cast<size_t>(m.j)];
      const bool tabu = m.kind == MoveKind::swap ? swaps.contains({std::min(a, b), std::max(a, b)})
                                                 : inserts.contains({a, m.j});
      const auto obj = cache.objective(apply_move(current, m));
      if (!obj) continue;
      if (tabu && !(p.aspiration && *obj < best_obj - 1e-12)) continue;
      if (!chosen || *obj < chosen_obj - 1e-12) {
        chosen = m;
        chosen_obj = *obj;
        chosen_tabu = tabu;
      }
    }
    if (!chosen) break;

    const NodeId a = current[static_cast<size_t>(chosen->i)];
    const NodeId b = current[static_cast<size_t>(chosen->j)];
    if (chosen->kind == MoveKind::swap) {
      swaps.push({std::min(a, b), std::max(a, b)});
    } else {
      inserts.push({a, chosen->i});
    }
    current = apply_move(current, *chosen);
    if (chosen_obj < best_obj - 1e-12) {
      best_obj = chosen_obj;
      best = current;
    }
    out.steps.push_back({it, *chosen, chosen_tabu, chosen_obj});
    out.trace.push_back({it, best_obj});
  }

  if (best == initial.order) {
    out.schedule = initial;
  } else {
    out.schedule = to_schedule(*evaluate_route(best, inst, w), inst);
  }
  return out;
}

}  // namespace evrp
