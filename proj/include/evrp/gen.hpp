#pragma once

// Seeded synthetic instances, charging-station scoring and instance files.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evrp/core.hpp"

namespace evrp {

struct GenConfig {
  std::uint64_t seed = 1;
  int min_events = 1;
  int max_events = 120;
  int max_days = 5;
  double area_km = 50.0;
  double fixed_fraction = 0.5;
  double station_probability = 0.7;
  int stations_per_event = 5;
  double max_walk_meters = 500.0;
  double speed_kmh = 40.0;
  double noise_max = 1.3;  // distance jitter is drawn from [1, noise_max]
  double km_per_kwh = 5.0;
  std::array<double, 3> prefs{0.5, 0.3, 0.2};
  double epsilon = 1e-3;
  int max_attempts = 200;

  void check() const;
};

// Preselection score of a compatible station within walking range.
double charging_score(const StationCandidate& c, const GenConfig& cfg);

// Index of the best compatible station within walking range, -1 if none.
// Ties go to the shorter walk, then to the lower index.
int preselect_station(const std::vector<StationCandidate>& candidates, const GenConfig& cfg);

// Deterministic function of `cfg`. Every returned instance has a feasible
// best-fit-decreasing solution. Throws Error(generation_failed) after
// cfg.max_attempts rejected draws.
Instance generate(const GenConfig& cfg);

inline constexpr int kInstanceFormatVersion = 1;

std::string to_json(const Instance& inst);
Instance from_json(const std::string& text);
void save(const Instance& inst, const std::string& path);
Instance load(const std::string& path);

}  // namespace evrp
