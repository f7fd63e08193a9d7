#include <cmath>

#include "evrp/core.hpp"
#include "evrp/schedule.hpp"

namespace evrp {

Weights normalize_weights(const Instance& inst, std::array<double, 3> prefs) {
  for (double p : prefs) {
    if (!(p >= 0.0)) throw Error(ErrorCode::invalid_argument, "preferences must be non-negative");
  }
  if (std::abs(prefs[0] + prefs[1] + prefs[2] - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_argument, "preferences must sum to 1");
  }
  // The construction only needs some weights to plan charging; the raw
  // preferences serve.
  const Schedule initial = bfd_initial(inst, Weights::raw(prefs[0], prefs[1], prefs[2]));

  std::array<SummandBounds, 3> bounds{};
  double distance = 0.0;
  double travel = 0.0;
  for (size_t i = 0; i + 1 < initial.order.size(); ++i) {
    distance += inst.dist(initial.order[i], initial.order[i + 1]);
    travel += inst.travel(initial.order[i], initial.order[i + 1]);
  }
  bounds[kDistance] = {min_edge_sum(inst.dist), distance};
  bounds[kTime] = {min_edge_sum(inst.travel), travel};
  bounds[kCharge] = {-inst.k_max, -inst.k_min};
  return weights_from_bounds(prefs, bounds);
}

}  // namespace evrp
