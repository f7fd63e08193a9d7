#include <cmath>
#include <fstream>
#include <sstream>

#include "evrp/gen.hpp"
#include "json.hpp"

namespace evrp {

namespace {

using Json = nlohmann::ordered_json;

// Integral values are written as integers so that minute-valued times
// stay integer in the file.
Json number(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
  return x;
}

Json station_json(const StationCandidate& c) {
  return Json{{"power_kw", number(c.power_kw)},
              {"walk_meters", number(c.walk_meters)},
              {"plug_count", c.plug_count},
              {"compatible", c.compatible}};
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (int u = 0; u < m.size(); ++u) {
    Json row = Json::array();
    for (int v = 0; v < m.size(); ++v) row.push_back(number(m(u, v)));
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::parse_error, "instance file: " + what);
}

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) schema_error(std::string("expected an object around '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing field '") + key + "'");
  return *it;
}

double num(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_number()) schema_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

StationCandidate station_from(const Json& j) {
  StationCandidate c;
  c.power_kw = num(j, "power_kw");
  c.walk_meters = num(j, "walk_meters");
  c.plug_count = static_cast<int>(num(j, "plug_count"));
  const Json& comp = field(j, "compatible");
  if (!comp.is_boolean()) schema_error("field 'compatible' must be a boolean");
  c.compatible = comp.get<bool>();
  return c;
}

Matrix matrix_from(const Json& j, int n, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) schema_error(std::string(name) + " must have n rows");
  Matrix m(n);
  for (int u = 0; u < n; ++u) {
    const Json& row = j[static_cast<size_t>(u)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) schema_error(std::string(name) + " must have n columns");
    for (int v = 0; v < n; ++v) {
      if (!row[static_cast<size_t>(v)].is_number()) schema_error(std::string(name) + " entries must be numbers");
      m(u, v) = row[static_cast<size_t>(v)].get<double>();
    }
  }
  return m;
}

}  // namespace

std::string to_json(const Instance& inst) {
  Json j;
  j["version"] = kInstanceFormatVersion;
  j["format"] = "evrp-instance";
  j["epsilon"] = number(inst.epsilon);
  j["battery"] = Json{{"k_min", number(inst.k_min)}, {"k_max", number(inst.k_max)}, {"k_start", number(inst.k_start)}};

  Json bounds = Json::array();
  for (const auto& b : inst.weights.bounds) bounds.push_back(Json::array({number(b.lower), number(b.upper)}));
  j["weights"] = Json{{"wd", number(inst.weights.wd)},
                      {"wt", number(inst.weights.wt)},
                      {"wc", number(inst.weights.wc)},
                      {"prefs", Json::array({number(inst.weights.prefs[0]), number(inst.weights.prefs[1]),
                                             number(inst.weights.prefs[2])})},
                      {"bounds", bounds}};
  j["separators"] = inst.separators;

  Json nodes = Json::array();
  for (const auto& v : inst.nodes) {
    Json node{{"id", v.id},
              {"kind", to_string(v.kind)},
              {"a_min", number(v.a_min)},
              {"a_max", number(v.a_max)},
              {"duration", number(v.duration)}};
    if (v.fixed_arrival) node["fixed_arrival"] = number(*v.fixed_arrival);
    node["x"] = number(v.x);
    node["y"] = number(v.y);
    if (v.charging) {
      const auto& c = *v.charging;
      Json alternates = Json::array();
      for (const auto& a : c.alternates) alternates.push_back(station_json(a));
      node["charging"] = Json{{"walk_time", number(c.walk_time)},
                              {"rate", number(c.rate)},
                              {"max_gain", number(c.max_gain)},
                              {"station", station_json(c.station)},
                              {"alternates", alternates}};
    }
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  j["dist"] = matrix_json(inst.dist);
  j["travel"] = matrix_json(inst.travel);
  return j.dump(1) + "\n";
}

namespace {

Instance instance_from(const Json& j) {
  const Json& version = field(j, "version");
  if (!version.is_number_integer()) schema_error("field 'version' must be an integer");
  if (version.get<int>() != kInstanceFormatVersion) {
    throw Error(ErrorCode::unsupported_version, "instance file version " + std::to_string(version.get<int>()) +
                                                    ", expected " + std::to_string(kInstanceFormatVersion));
  }

  Instance inst;
  inst.epsilon = num(j, "epsilon");
  const Json& battery = field(j, "battery");
  inst.k_min = num(battery, "k_min");
  inst.k_max = num(battery, "k_max");
  inst.k_start = num(battery, "k_start");

  const Json& w = field(j, "weights");
  inst.weights.wd = num(w, "wd");
  inst.weights.wt = num(w, "wt");
  inst.weights.wc = num(w, "wc");
  const Json& prefs = field(w, "prefs");
  if (!prefs.is_array() || prefs.size() != 3) schema_error("weights.prefs must have 3 entries");
  for (size_t i = 0; i < 3; ++i) inst.weights.prefs[i] = prefs[i].get<double>();
  if (w.contains("bounds")) {
    const Json& bounds = w["bounds"];
    if (!bounds.is_array() || bounds.size() != 3) schema_error("weights.bounds must have 3 pairs");
    for (size_t i = 0; i < 3; ++i) {
      if (!bounds[i].is_array() || bounds[i].size() != 2) schema_error("weights.bounds entries are [lower, upper]");
      inst.weights.bounds[i] = {bounds[i][0].get<double>(), bounds[i][1].get<double>()};
    }
  }

  const Json& seps = field(j, "separators");
  if (!seps.is_array()) schema_error("separators must be an array");
  for (const auto& s : seps) inst.separators.push_back(s.get<int>());

  const Json& nodes = field(j, "nodes");
  if (!nodes.is_array()) schema_error("nodes must be an array");
  for (const auto& jn : nodes) {
    EventNode v;
    v.id = static_cast<NodeId>(num(jn, "id"));
    const Json& kind = field(jn, "kind");
    if (!kind.is_string()) schema_error("node kind must be a string");
    try {
      v.kind = node_kind_from_string(kind.get<std::string>());
    } catch (const Error& e) {
      schema_error(e.what());
    }
    v.a_min = num(jn, "a_min");
    v.a_max = num(jn, "a_max");
    v.duration = num(jn, "duration");
    if (jn.contains("fixed_arrival")) v.fixed_arrival = num(jn, "fixed_arrival");
    if (jn.contains("x")) v.x = num(jn, "x");
    if (jn.contains("y")) v.y = num(jn, "y");
    if (jn.contains("charging")) {
      const Json& jc = jn["charging"];
      ChargingOption c;
      c.walk_time = num(jc, "walk_time");
      c.rate = num(jc, "rate");
      c.max_gain = num(jc, "max_gain");
      if (jc.contains("station")) c.station = station_from(jc["station"]);
      if (jc.contains("alternates")) {
        for (const auto& a : jc["alternates"]) c.alternates.push_back(station_from(a));
      }
      v.charging = std::move(c);
    }
    inst.nodes.push_back(std::move(v));
  }
  const int n = static_cast<int>(inst.nodes.size());
  inst.dist = matrix_from(field(j, "dist"), n, "dist");
  inst.travel = matrix_from(field(j, "travel"), n, "travel");

  try {
    finalize(inst);
  } catch (const Error& e) {
    schema_error(e.what());
  }
  return inst;
}

}  // namespace

Instance from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, "instance file: malformed JSON at byte " + std::to_string(e.byte));
  }
  try {
    return instance_from(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("instance file: ") + e.what());
  }
}

void save(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << to_json(inst);
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

Instance load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace evrp
