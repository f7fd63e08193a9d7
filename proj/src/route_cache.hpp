#pragma once

#include <chrono>
#include <optional>
#include <unordered_map>

#include "evrp/schedule.hpp"

namespace evrp {

struct RouteHash {
  size_t operator()(const Route& r) const noexcept {
    size_t h = 1469598103934665603ull;
    for (NodeId u : r) h = (h ^ static_cast<size_t>(u)) * 1099511628211ull;
    return h;
  }
};

// Memoized planner objectives of complete routes.
class RouteCache {
 public:
  RouteCache(const Instance& inst, const Weights& w) : inst_(inst), w_(w) {}

  std::optional<double> objective(const Route& r) {
    auto it = cache_.find(r);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > kMaxEntries) cache_.clear();
    auto e = evaluate_route(r, inst_, w_);
    std::optional<double> out;
    if (e) out = e->objective;
    cache_.emplace(r, out);
    return out;
  }

 private:
  static constexpr size_t kMaxEntries = 1 << 18;
  const Instance& inst_;
  const Weights& w_;
  std::unordered_map<Route, std::optional<double>, RouteHash> cache_;
};

class Deadline {
 public:
  explicit Deadline(std::optional<double> seconds)
      : seconds_(seconds), start_(std::chrono::steady_clock::now()) {}

  bool passed() const {
    if (!seconds_) return false;
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    return d.count() > *seconds_;
  }

  double elapsed() const {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    return d.count();
  }

 private:
  std::optional<double> seconds_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace evrp
