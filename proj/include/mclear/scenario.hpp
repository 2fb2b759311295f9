#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mclear/common.hpp"
#include "mclear/demand.hpp"

namespace mclear {

struct Line {
  std::string id;
  std::string from;
  std::string to;
  double reactance = 0.0;
  double fmax = 0.0;
  double susceptance = 0.0;  // derived, 1 / reactance
};

struct Network {
  std::vector<std::string> buses;
  std::vector<Line> lines;
  std::string slack_bus;
  double theta_limit = 0.0;  // radians

  int bus_index(const std::string& b) const {
    for (size_t i = 0; i < buses.size(); ++i)
      if (buses[i] == b) return static_cast<int>(i);
    return -1;
  }
  // +1 at the origin bus, -1 at the destination, 0 elsewhere.
  static int incidence(const Line& l, const std::string& bus) {
    if (bus == l.from) return 1;
    if (bus == l.to) return -1;
    return 0;
  }
};

inline double derive_susceptance(double reactance) {
  if (!(reactance > 0))
    throw validation_error("line reactance must be positive");
  return 1.0 / reactance;
}

struct GeneratorSpec {
  std::string id;
  std::string bus;
  double marginal_cost = 0.0;       // $/MWh
  double reserve_cost = kNaN();     // $/MWh; defaults to a fraction of marginal_cost
  double startup_cost = 0.0;        // $
  double shutdown_cost = kNaN();    // $; defaults to a fraction of startup_cost
  double ramp_cost = 0.0;           // $/MW
  double ramp_up = 0.0;             // MW/h
  double ramp_down = 0.0;           // MW/h
  double startup_rate = kNaN();     // MW/h; defaults to ramp_up
  double shutdown_rate = kNaN();    // MW/h; defaults to ramp_down
  double gmin = 0.0;                // MW
  double gmax = 0.0;                // MW
  int min_down = 1;                 // hours
  int min_up = 1;                   // hours
  bool reserve_capable = false;
  int initial_on = 0;               // commitment state before period 1
  double initial_output = 0.0;      // MW before period 1
  int forced_on_hours = 0;
  int forced_off_hours = 0;

  static double kNaN() { return std::numeric_limits<double>::quiet_NaN(); }
};

struct DemandPeriod {
  double qbar = 0.0;   // MW, maximum demand
  double qmin = 0.0;   // MW, fixed (price-insensitive) part
  double price_high = 0.0;  // $/MWh at qmin
  double price_low = 0.0;   // $/MWh at qbar
  DemandCurve curve;        // derived at load time
};

struct DemandSpec {
  std::string bus;
  std::vector<DemandPeriod> periods;  // length T
};

struct ScenarioConfig {
  int periods = 1;                    // T
  double phi = 0.0;                   // reserve requirement as demand fraction
  double h = 1.0;                     // demand-flexibility scalar on the floors
  double fmax_pct = 100.0;            // cumulative applied line-capacity scaling
  double gmax_pct = 100.0;            // cumulative applied generation scaling
  double reserve_cost_factor = 0.4;
  double shutdown_cost_factor = 0.2;
  double theta_limit = 0.0;
  std::string slack_bus;
};

struct Scenario {
  Network network;
  std::vector<GeneratorSpec> generators;
  std::vector<DemandSpec> demands;
  ScenarioConfig config;
  std::string name = "scenario";
  std::vector<std::string> warnings;

  // effective floor on demand for a given period entry
  double floor(const DemandPeriod& d) const { return config.h * d.qmin; }
};

// ---------------------------------------------------------------------------

inline Scenario& apply_defaults(Scenario& s) {
  for (auto& g : s.generators) {
    if (std::isnan(g.reserve_cost))
      g.reserve_cost = s.config.reserve_cost_factor * g.marginal_cost;
    if (std::isnan(g.shutdown_cost))
      g.shutdown_cost = s.config.shutdown_cost_factor * g.startup_cost;
    if (std::isnan(g.startup_rate)) g.startup_rate = g.ramp_up;
    if (std::isnan(g.shutdown_rate)) g.shutdown_rate = g.ramp_down;
  }
  return s;
}

inline void validate_scenario(Scenario& s) {
  const auto& cfg = s.config;
  auto fail = [](const std::string& path, const std::string& what) {
    throw validation_error(path + ": " + what);
  };
  if (cfg.periods < 1) fail("config.T", "must be >= 1");
  if (!(cfg.phi >= 0.0 && cfg.phi < 1.0)) fail("config.phi", "must satisfy 0 <= phi < 1");
  if (!(cfg.h >= 0.0)) fail("config.h", "must be nonnegative");
  if (!(cfg.fmax_pct > 0.0)) fail("config.fmax_pct", "must be positive");
  if (!(cfg.gmax_pct > 0.0)) fail("config.gmax_pct", "must be positive");
  if (!(cfg.theta_limit > 0.0)) fail("config.theta_limit", "must be positive");
  if (s.network.buses.empty()) fail("buses", "at least one bus required");
  {
    std::unordered_map<std::string, int> seen;
    for (size_t i = 0; i < s.network.buses.size(); ++i)
      if (++seen[s.network.buses[i]] > 1)
        fail("buses[" + std::to_string(i) + "]", "duplicate bus id");
  }
  if (s.network.bus_index(s.network.slack_bus) < 0)
    fail("config.slack_bus", "unknown bus '" + s.network.slack_bus + "'");

  for (size_t i = 0; i < s.network.lines.size(); ++i) {
    const Line& l = s.network.lines[i];
    const std::string path = "lines[" + std::to_string(i) + "]";
    if (s.network.bus_index(l.from) < 0)
      fail(path + ".from", "line " + l.id + " references unknown bus '" + l.from + "'");
    if (s.network.bus_index(l.to) < 0)
      fail(path + ".to", "line " + l.id + " references unknown bus '" + l.to + "'");
    if (l.from == l.to) fail(path, "line " + l.id + " must join two distinct buses");
    if (!(l.susceptance > 0)) fail(path + ".reactance", "must be positive");
    if (!(l.fmax > 0)) fail(path + ".fmax", "must be positive");
  }

  bool any_reserve = false;
  for (size_t i = 0; i < s.generators.size(); ++i) {
    const GeneratorSpec& g = s.generators[i];
    const std::string path = "generators[" + std::to_string(i) + "]";
    if (s.network.bus_index(g.bus) < 0)
      fail(path + ".bus", "generator " + g.id + " references unknown bus '" + g.bus + "'");
    if (!(g.gmin >= 0 && g.gmax >= g.gmin)) fail(path, "requires 0 <= gmin <= gmax");
    if (g.ramp_up < 0 || g.ramp_down < 0 || g.startup_rate < 0 || g.shutdown_rate < 0)
      fail(path, "ramp and start/stop rates must be nonnegative");
    if (g.min_down < 1 || g.min_up < 1) fail(path, "min up/down times must be >= 1");
    if (g.forced_on_hours > 0 && g.forced_off_hours > 0)
      fail(path, "at most one of t_on / t_off may be positive");
    if (g.forced_on_hours > 0 && g.initial_on != 1)
      fail(path, "t_on > 0 requires z0 = 1");
    if (g.forced_off_hours > 0 && g.initial_on != 0)
      fail(path, "t_off > 0 requires z0 = 0");
    if (g.initial_on == 0 && g.initial_output != 0.0)
      fail(path, "z0 = 0 requires g0 = 0");
    any_reserve = any_reserve || g.reserve_capable;
  }
  if (cfg.phi > 0 && !any_reserve)
    fail("generators", "phi > 0 needs at least one reserve-capable generator");

  for (size_t i = 0; i < s.demands.size(); ++i) {
    DemandSpec& d = s.demands[i];
    const std::string path = "demands[" + std::to_string(i) + "]";
    if (s.network.bus_index(d.bus) < 0)
      fail(path + ".bus", "demand references unknown bus '" + d.bus + "'");
    if (static_cast<int>(d.periods.size()) != cfg.periods)
      fail(path + ".series", "expected " + std::to_string(cfg.periods) + " entries");
    for (size_t t = 0; t < d.periods.size(); ++t) {
      DemandPeriod& p = d.periods[t];
      const std::string ppath = path + ".series[" + std::to_string(t) + "]";
      if (!(p.qmin >= 0)) fail(ppath + ".qmin", "must be nonnegative");
      if (!(p.qbar > p.qmin)) fail(ppath, "requires qbar > qmin");
      if (!(p.price_low >= 0)) fail(ppath + ".pl", "must be nonnegative");
      if (!(p.price_high > p.price_low)) fail(ppath, "requires ph > pl");
      if (cfg.h * p.qmin >= p.qbar)
        s.warnings.push_back(ppath + ": scaled floor " +
                             std::to_string(cfg.h * p.qmin) +
                             " reaches or exceeds qbar " + std::to_string(p.qbar));
    }
  }
}

namespace scenario_io {

using nlohmann::json;

inline double num_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw parse_error(path + "." + key + ": missing field");
  if (!j.at(key).is_number()) throw parse_error(path + "." + key + ": expected a number");
  return j.at(key).get<double>();
}
inline double num_or(const json& j, const std::string& key, double dflt) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<double>() : dflt;
}
inline std::string str_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw parse_error(path + "." + key + ": missing field");
  if (!j.at(key).is_string()) throw parse_error(path + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

inline Scenario from_json(const json& j) {
  Scenario s;
  if (!j.is_object()) throw parse_error("top level: expected an object");
  const json& cfg = j.contains("config") ? j.at("config") : json::object();
  s.config.periods = static_cast<int>(num_at(cfg, "T", "config"));
  s.config.phi = num_at(cfg, "phi", "config");
  s.config.h = num_or(cfg, "h", 1.0);
  s.config.fmax_pct = num_or(cfg, "fmax_pct", 100.0);
  s.config.gmax_pct = num_or(cfg, "gmax_pct", 100.0);
  s.config.reserve_cost_factor = num_or(cfg, "reserve_cost_factor", 0.4);
  s.config.shutdown_cost_factor = num_or(cfg, "shutdown_cost_factor", 0.2);
  s.config.theta_limit = num_at(cfg, "theta_limit", "config");
  s.config.slack_bus = str_at(cfg, "slack_bus", "config");
  s.network.slack_bus = s.config.slack_bus;
  s.network.theta_limit = s.config.theta_limit;
  if (j.contains("name") && j.at("name").is_string())
    s.name = j.at("name").get<std::string>();

  if (!j.contains("buses") || !j.at("buses").is_array())
    throw parse_error("buses: missing or not an array");
  for (const auto& b : j.at("buses")) s.network.buses.push_back(b.get<std::string>());

  if (j.contains("lines"))
    for (size_t i = 0; i < j.at("lines").size(); ++i) {
      const json& lj = j.at("lines")[i];
      const std::string path = "lines[" + std::to_string(i) + "]";
      Line l;
      l.id = str_at(lj, "id", path);
      l.from = str_at(lj, "from", path);
      l.to = str_at(lj, "to", path);
      l.reactance = num_at(lj, "reactance", path);
      if (!(l.reactance > 0))
        throw validation_error(path + ".reactance: must be positive");
      l.susceptance = derive_susceptance(l.reactance);
      l.fmax = num_at(lj, "fmax", path);
      s.network.lines.push_back(l);
    }

  if (j.contains("generators"))
    for (size_t i = 0; i < j.at("generators").size(); ++i) {
      const json& gj = j.at("generators")[i];
      const std::string path = "generators[" + std::to_string(i) + "]";
      GeneratorSpec g;
      g.id = str_at(gj, "id", path);
      g.bus = str_at(gj, "bus", path);
      g.marginal_cost = num_at(gj, "lambda", path);
      g.reserve_cost = num_or(gj, "lambda_res", GeneratorSpec::kNaN());
      g.startup_cost = num_at(gj, "c_su", path);
      g.shutdown_cost = num_or(gj, "c_sd", GeneratorSpec::kNaN());
      g.ramp_cost = num_at(gj, "c_rp", path);
      g.ramp_up = num_at(gj, "ru", path);
      g.ramp_down = num_at(gj, "rd", path);
      g.startup_rate = num_or(gj, "su", GeneratorSpec::kNaN());
      g.shutdown_rate = num_or(gj, "sd", GeneratorSpec::kNaN());
      g.gmin = num_at(gj, "gmin", path);
      g.gmax = num_at(gj, "gmax", path);
      g.min_down = static_cast<int>(num_at(gj, "dmin", path));
      g.min_up = static_cast<int>(num_at(gj, "umin", path));
      if (!gj.contains("reserve_capable"))
        throw parse_error(path + ".reserve_capable: missing field");
      g.reserve_capable = gj.at("reserve_capable").is_boolean()
                              ? gj.at("reserve_capable").get<bool>()
                              : num_at(gj, "reserve_capable", path) != 0.0;
      g.initial_on = static_cast<int>(num_at(gj, "z0", path));
      g.initial_output = num_at(gj, "g0", path);
      g.forced_on_hours = static_cast<int>(num_or(gj, "t_on", 0.0));
      g.forced_off_hours = static_cast<int>(num_or(gj, "t_off", 0.0));
      s.generators.push_back(g);
    }

  if (j.contains("demands"))
    for (size_t i = 0; i < j.at("demands").size(); ++i) {
      const json& dj = j.at("demands")[i];
      const std::string path = "demands[" + std::to_string(i) + "]";
      DemandSpec d;
      d.bus = str_at(dj, "bus", path);
      if (!dj.contains("series") || !dj.at("series").is_array())
        throw parse_error(path + ".series: missing or not an array");
      const auto& series = dj.at("series");
      for (size_t t = 0; t < series.size(); ++t) {
        const std::string ppath = path + ".series[" + std::to_string(t) + "]";
        DemandPeriod p;
        p.qbar = num_at(series[t], "qbar", ppath);
        p.qmin = num_at(series[t], "qmin", ppath);
        p.price_high = num_at(series[t], "ph", ppath);
        p.price_low = num_at(series[t], "pl", ppath);
        d.periods.push_back(p);
      }
      // a single entry may stand for a flat series
      if (d.periods.size() == 1 && s.config.periods > 1)
        d.periods.assign(s.config.periods, d.periods[0]);
      s.demands.push_back(d);
    }
  return s;
}

inline json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["config"] = {{"T", s.config.periods},
                 {"phi", s.config.phi},
                 {"h", s.config.h},
                 {"fmax_pct", s.config.fmax_pct},
                 {"gmax_pct", s.config.gmax_pct},
                 {"reserve_cost_factor", s.config.reserve_cost_factor},
                 {"shutdown_cost_factor", s.config.shutdown_cost_factor},
                 {"theta_limit", s.config.theta_limit},
                 {"slack_bus", s.config.slack_bus}};
  j["buses"] = s.network.buses;
  j["lines"] = json::array();
  for (const auto& l : s.network.lines)
    j["lines"].push_back({{"id", l.id},
                          {"from", l.from},
                          {"to", l.to},
                          {"reactance", l.reactance},
                          {"fmax", l.fmax}});
  j["generators"] = json::array();
  for (const auto& g : s.generators)
    j["generators"].push_back({{"id", g.id},
                               {"bus", g.bus},
                               {"lambda", g.marginal_cost},
                               {"lambda_res", g.reserve_cost},
                               {"c_su", g.startup_cost},
                               {"c_sd", g.shutdown_cost},
                               {"c_rp", g.ramp_cost},
                               {"ru", g.ramp_up},
                               {"rd", g.ramp_down},
                               {"su", g.startup_rate},
                               {"sd", g.shutdown_rate},
                               {"gmin", g.gmin},
                               {"gmax", g.gmax},
                               {"dmin", g.min_down},
                               {"umin", g.min_up},
                               {"reserve_capable", g.reserve_capable},
                               {"z0", g.initial_on},
                               {"g0", g.initial_output},
                               {"t_on", g.forced_on_hours},
                               {"t_off", g.forced_off_hours}});
  j["demands"] = json::array();
  for (const auto& d : s.demands) {
    json series = json::array();
    for (const auto& p : d.periods)
      series.push_back({{"qbar", p.qbar},
                        {"qmin", p.qmin},
                        {"ph", p.price_high},
                        {"pl", p.price_low}});
    j["demands"].push_back({{"bus", d.bus}, {"series", series}});
  }
  return j;
}

}  // namespace scenario_io

inline void finalize_scenario(Scenario& s) {
  apply_defaults(s);
  validate_scenario(s);
  for (auto& d : s.demands)
    for (auto& p : d.periods)
      p.curve = calibrate(p.qmin, p.qbar, p.price_high, p.price_low);
}

inline Scenario load_scenario_text(const std::string& text, const std::string& name = "") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw parse_error(std::string("scenario parse failure: ") + e.what());
  }
  Scenario s = scenario_io::from_json(j);
  if (!name.empty() && !j.contains("name")) s.name = name;
  finalize_scenario(s);
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot open scenario file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  std::string name = path;
  if (auto pos = name.find_last_of('/'); pos != std::string::npos)
    name = name.substr(pos + 1);
  if (auto pos = name.find_last_of('.'); pos != std::string::npos)
    name = name.substr(0, pos);
  return load_scenario_text(text, name);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw io_error("cannot write scenario file: " + path);
  f << scenario_io::to_json(s).dump(2) << "\n";
}

// Multiplicative rescaling of the flexibility floor, line capacities, and
// generation capacities. The demand curves themselves are untouched.
inline Scenario scale_scenario(const Scenario& base, double h, double fmax_pct,
                               double gmax_pct) {
  if (!(h >= 0)) throw validation_error("scale_scenario: h must be nonnegative");
  if (!(fmax_pct > 0) || !(gmax_pct > 0))
    throw validation_error("scale_scenario: capacity percentages must be positive");
  Scenario s = base;
  s.config.h *= h;
  s.config.fmax_pct *= fmax_pct / 100.0;
  s.config.gmax_pct *= gmax_pct / 100.0;
  for (auto& l : s.network.lines) l.fmax *= fmax_pct / 100.0;
  for (auto& g : s.generators) g.gmax *= gmax_pct / 100.0;
  s.warnings.clear();
  for (const auto& d : s.demands)
    for (size_t t = 0; t < d.periods.size(); ++t)
      if (s.config.h * d.periods[t].qmin >= d.periods[t].qbar)
        s.warnings.push_back("demand at " + d.bus + ", period " +
                             std::to_string(t + 1) + ": scaled floor reaches qbar");
  return s;
}

// Content hash used to tie reports to the scenario that produced them.
inline std::uint64_t scenario_fingerprint(const Scenario& s) {
  return fnv1a(scenario_io::to_json(s).dump());
}

}  // namespace mclear
