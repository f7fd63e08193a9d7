#include <algorithm>
#include <cmath>
#include <numbers>

#include "evrp/gen.hpp"
#include "evrp/rng.hpp"
#include "evrp/schedule.hpp"

namespace evrp {

namespace {

constexpr double kDay = 1440.0;
constexpr double kDayStart = 420.0;   // 07:00
constexpr double kDayEnd = 1140.0;    // 19:00
constexpr double kFixedFrom = 480.0;  // fixed appointments between 08:00
constexpr double kFixedTo = 1080.0;   // and 18:00
constexpr double kWalkMetersPerMinute = 80.0;
constexpr double kPowerLevels[] = {3.7, 11.0, 22.0, 50.0, 75.0, 150.0, 300.0};

double round6(double x) { return std::round(x * 1e6) / 1e6; }

struct Site {
  double x;
  double y;
};

struct Draft {
  NodeKind kind;
  Site site;
  double a_min;
  double a_max;
  double duration;
  std::optional<double> fixed_arrival;
};

std::optional<ChargingOption> draw_charging(const GenConfig& cfg, Rng& rng, double duration) {
  if (!rng.bernoulli(cfg.station_probability)) return std::nullopt;
  const auto count = rng.uniform_int(1, std::max(1, cfg.stations_per_event));
  std::vector<StationCandidate> candidates;
  for (int i = 0; i < count; ++i) {
    StationCandidate c;
    c.power_kw = kPowerLevels[rng.uniform_int(0, static_cast<std::int64_t>(std::size(kPowerLevels)) - 1)];
    c.walk_meters = std::round(rng.uniform(0.0, cfg.max_walk_meters));
    c.plug_count = static_cast<int>(rng.uniform_int(1, 6));
    c.compatible = rng.bernoulli(0.85);
    candidates.push_back(c);
  }
  const int best = preselect_station(candidates, cfg);
  if (best < 0) return std::nullopt;

  ChargingOption opt;
  opt.station = candidates[static_cast<size_t>(best)];
  for (int i = 0; i < count; ++i) {
    if (i != best) opt.alternates.push_back(candidates[static_cast<size_t>(i)]);
  }
  opt.walk_time = std::ceil(opt.station.walk_meters / kWalkMetersPerMinute);
  opt.rate = round6(opt.station.power_kw * cfg.km_per_kwh / 60.0);
  opt.max_gain = round6(opt.rate * duration);
  return opt;
}

Instance draw(const GenConfig& cfg, Rng& rng) {
  const int events = static_cast<int>(rng.uniform_int(cfg.min_events, cfg.max_events));
  const int days = static_cast<int>(rng.uniform_int(1, cfg.max_days));
  const int per_day = (events + days - 1) / days;

  // Denser days get shorter appointments and a tighter neighbourhood.
  const double budget = (kFixedTo - kFixedFrom) / std::max(1, per_day);
  const double radius = std::min(cfg.area_km / 2.0, std::max(1.0, 0.16 * budget));

  const Site home{rng.uniform(0.0, cfg.area_km), rng.uniform(0.0, cfg.area_km)};
  auto near_home = [&]() {
    const double r = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return Site{std::clamp(home.x + r * std::cos(phi), 0.0, cfg.area_km),
                std::clamp(home.y + r * std::sin(phi), 0.0, cfg.area_km)};
  };
  const double horizon_end = kDayEnd + kDay * (days - 1);

  std::vector<int> fixed_on_day(static_cast<size_t>(days), 0);
  std::vector<int> flexible_day;  // -1 for any day
  for (int e = 0; e < events; ++e) {
    if (rng.bernoulli(cfg.fixed_fraction)) {
      ++fixed_on_day[static_cast<size_t>(rng.uniform_int(0, days - 1))];
    } else {
      flexible_day.push_back(rng.bernoulli(0.5) ? -1 : static_cast<int>(rng.uniform_int(0, days - 1)));
    }
  }

  std::vector<Draft> drafts;
  drafts.push_back({NodeKind::start, home, kDayStart, kDayEnd, 0.0, std::nullopt});
  for (int d = 0; d < days; ++d) {
    const double offset = kDay * d;
    const int m = fixed_on_day[static_cast<size_t>(d)];
    if (m > 0) {
      // Non-overlapping slots keep fixed appointments in a total order.
      const double slot = (kFixedTo - kFixedFrom) / m;
      for (int j = 0; j < m; ++j) {
        const double hi = std::max(5.0, std::min(120.0, std::floor(0.6 * slot)));
        const double lo = std::min(30.0, hi);
        const double duration = static_cast<double>(rng.uniform_int(static_cast<int>(lo), static_cast<int>(hi)));
        const double begin = offset + kFixedFrom + std::ceil(slot * j);
        const double latest = offset + kFixedFrom + std::floor(slot * (j + 1)) - duration;
        const double at = begin + static_cast<double>(rng.uniform_int(0, std::max<std::int64_t>(0, static_cast<std::int64_t>(latest - begin))));
        drafts.push_back({NodeKind::fixed, near_home(), at, at + duration, duration, at});
      }
    }
    for (int day : flexible_day) {
      if (day != d && !(day < 0 && d == 0)) continue;
      const double hi = std::max(10.0, std::min(120.0, std::floor(0.5 * budget)));
      const double lo = std::max(10.0, std::floor(0.2 * budget));
      const double duration = static_cast<double>(rng.uniform_int(static_cast<int>(std::min(lo, hi)), static_cast<int>(hi)));
      double a_min = kDayStart;
      double a_max = horizon_end;
      if (day >= 0) {
        a_min = offset + kDayStart + static_cast<double>(rng.uniform_int(0, 180));
        a_max = offset + kDayEnd - static_cast<double>(rng.uniform_int(0, 180));
        a_max = std::max(a_max, a_min + duration + 60.0);
      }
      drafts.push_back({NodeKind::flexible, near_home(), a_min, a_max, duration, std::nullopt});
    }
    drafts.push_back({NodeKind::separator, home, offset + kDayStart, offset + kDay + kDayStart,
                      kDay + kDayStart - kDayEnd, std::nullopt});
  }
  const double final_departure = kDay * days + kDayStart;
  drafts.push_back({NodeKind::end, home, final_departure, final_departure, 0.0, std::nullopt});

  Instance inst;
  const int n = static_cast<int>(drafts.size());
  for (int u = 0; u < n; ++u) {
    const auto& d = drafts[static_cast<size_t>(u)];
    EventNode node;
    node.id = u;
    node.kind = d.kind;
    node.a_min = d.a_min;
    node.a_max = d.a_max;
    node.duration = d.duration;
    node.fixed_arrival = d.fixed_arrival;
    node.x = round6(d.site.x);
    node.y = round6(d.site.y);
    if (d.kind != NodeKind::start && d.kind != NodeKind::end) node.charging = draw_charging(cfg, rng, d.duration);
    if (d.kind == NodeKind::separator) inst.separators.push_back(u);
    inst.nodes.push_back(std::move(node));
  }

  inst.dist = Matrix(n);
  inst.travel = Matrix(n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const auto& a = inst.nodes[static_cast<size_t>(u)];
      const auto& b = inst.nodes[static_cast<size_t>(v)];
      const double jitter = rng.uniform(1.0, cfg.noise_max);
      const double km = round6(std::hypot(a.x - b.x, a.y - b.y) * jitter);
      inst.dist(u, v) = km;
      inst.travel(u, v) = std::ceil(km / cfg.speed_kmh * 60.0 - 1e-9);
    }
  }

  inst.k_max = round6(rng.uniform(150.0, 400.0));
  inst.k_start = round6(rng.uniform(0.3, 0.8) * inst.k_max);
  inst.k_min = round6(0.1 * inst.k_max);
  inst.epsilon = cfg.epsilon;
  inst.weights = Weights::raw(cfg.prefs[0], cfg.prefs[1], cfg.prefs[2]);
  finalize(inst);
  return inst;
}

}  // namespace

void GenConfig::check() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::invalid_argument, std::string("GenConfig: ") + what); };
  if (max_events < 1 || min_events < 1 || min_events > max_events) fail("need 1 <= minEvents <= maxEvents");
  if (max_days < 1) fail("maxDays must be >= 1");
  if (!(area_km > 0.0)) fail("areaKm must be > 0");
  for (double p : {fixed_fraction, station_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
  }
  if (stations_per_event < 1) fail("stationsPerEvent must be >= 1");
  if (!(max_walk_meters > 0.0)) fail("maxWalkMeters must be > 0");
  if (!(speed_kmh > 0.0)) fail("speedKmh must be > 0");
  if (!(noise_max >= 1.0 && noise_max <= 1.3)) fail("noise must lie in [1.0, 1.3]");
  if (max_attempts < 1) fail("maxAttempts must be >= 1");
}

double charging_score(const StationCandidate& c, const GenConfig& cfg) {
  return 0.5 * std::min(c.power_kw / 150.0, 1.0) + 0.3 * (1.0 - c.walk_meters / cfg.max_walk_meters) +
         0.2 * std::min(c.plug_count, 4) / 4.0;
}

int preselect_station(const std::vector<StationCandidate>& candidates, const GenConfig& cfg) {
  int best = -1;
  double best_score = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!c.compatible || c.walk_meters > cfg.max_walk_meters) continue;
    const double s = charging_score(c, cfg);
    if (best < 0 || s > best_score ||
        (s == best_score && c.walk_meters < candidates[static_cast<size_t>(best)].walk_meters)) {
      best = static_cast<int>(i);
      best_score = s;
    }
  }
  return best;
}

Instance generate(const GenConfig& cfg) {
  cfg.check();
  Rng rng(cfg.seed);
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    Instance inst = draw(cfg, rng);
    try {
      // A feasible construction witnesses feasibility and fixes the bounds.
      inst.weights = normalize_weights(inst, cfg.prefs);
      return inst;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_initial_solution) throw;
    }
  }
  throw Error(ErrorCode::generation_failed,
              "no feasible instance after " + std::to_string(cfg.max_attempts) + " attempts (seed " +
                  std::to_string(cfg.seed) + ")");
}

}  // namespace evrp
