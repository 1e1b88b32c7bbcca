#include "polarpark/scenario_file.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "polarpark/error.hpp"

namespace polarpark {

namespace {

using nlohmann::json;

[[noreturn]] void reject(const std::string& msg) { throw Error(ErrorCode::InvalidScenario, msg); }

void require_known_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) reject(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) reject("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) reject("missing '" + key + "' in " + where);
  const json& v = obj.at(key);
  if (!v.is_number()) reject("'" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
  return obj.contains(key) ? number(obj, key, "scenario") : fallback;
}

ControllerSpec parse_controller(const json& c) {
  require_known_keys(c, {"name", "gains"}, "controller");
  if (!c.contains("name") || !c.at("name").is_string()) reject("controller needs a string 'name'");
  const ControllerKind kind = controller_kind_from_string(c.at("name").get<std::string>());
  const json gains = c.value("gains", json::object());
  try {
    switch (kind) {
      case ControllerKind::GloFo:
      case ControllerKind::BoFo: {
        require_known_keys(gains, {"k1", "k2", "k3"}, "gains");
        const UnicycleGains g(number(gains, "k1", "gains"), number(gains, "k2", "gains"),
                              number(gains, "k3", "gains"));
        return kind == ControllerKind::GloFo ? ControllerSpec::glofo(g) : ControllerSpec::bofo(g);
      }
      case ControllerKind::DeadbeatPower:
      case ControllerKind::DeadbeatExp:
      case ControllerKind::DeadbeatBackstep: {
        require_known_keys(gains, {"c1", "c2", "v"}, "gains");
        const DubinsGains g(number(gains, "c1", "gains"), number(gains, "c2", "gains"),
                            number(gains, "v", "gains"));
        if (kind == ControllerKind::DeadbeatPower) return ControllerSpec::deadbeat_power(g);
        if (kind == ControllerKind::DeadbeatExp) return ControllerSpec::deadbeat_exp(g);
        return ControllerSpec::deadbeat_backstep(g);
      }
      case ControllerKind::Null:
        require_known_keys(gains, {}, "gains");
        return ControllerSpec::null();
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::GainConstraint) reject(e.what());
    throw;
  }
  reject("unreachable controller kind");
}

json controller_json(const ControllerSpec& spec) {
  json c;
  c["name"] = std::string(to_string(spec.kind()));
  switch (spec.kind()) {
    case ControllerKind::GloFo:
    case ControllerKind::BoFo: {
      const auto& g = spec.unicycle_gains();
      c["gains"] = {{"k1", g.k1()}, {"k2", g.k2()}, {"k3", g.k3()}};
      break;
    }
    case ControllerKind::DeadbeatPower:
    case ControllerKind::DeadbeatExp:
    case ControllerKind::DeadbeatBackstep: {
      const auto& g = spec.dubins_gains();
      c["gains"] = {{"c1", g.c1()}, {"c2", g.c2()}, {"v", g.v()}};
      break;
    }
    case ControllerKind::Null:
      c["gains"] = json::object();
      break;
  }
  return c;
}

Scenario make(std::string name, PolarState initial, ControllerSpec controller, double t_max,
              double cutoff_rho) {
  Scenario s;
  s.name = std::move(name);
  s.initial = initial;
  s.controller = controller;
  s.t_max = t_max;
  s.cutoff_rho = cutoff_rho;
  return s;
}

// Gains and cutoff of the constant-speed parking runs.
const DubinsGains kPowerRateGains{2.05, 2.1, 0.5};
const DubinsGains kExpRateGains{0.7, 1.3, 0.5};
constexpr double kParkingCutoff = 0.01;
constexpr double kDeadbeatHorizon = 30.0;
constexpr double kUnicycleHorizon = 60.0;
constexpr double kLosOffset = 0.05;

std::vector<Scenario> fig2_bofo() {
  const auto spec = ControllerSpec::bofo(UnicycleGains{1.0, 3.0, 2.0});
  // Initial conditions near |gamma0| = pi are pulled inside S1 by kLosOffset.
  const PolarState ics[] = {
      {2.0, kPi / 2.0, kPi - kLosOffset},
      {2.0, -kPi / 2.0, -(kPi - kLosOffset)},
      {1.5, kPi, kPi - kLosOffset},
      {1.0, kPi / 4.0, 0.0},
      {2.0, 3.0 * kPi / 4.0, kPi / 2.0},
      {1.5, 0.1, -kPi / 2.0},
  };
  std::vector<Scenario> out;
  int i = 0;
  for (const auto& ic : ics) {
    out.push_back(make("fig2-bofo-" + std::to_string(i++), ic, spec, kUnicycleHorizon, 0.0));
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    reject(std::string("not valid JSON: ") + e.what());
  }
  require_known_keys(doc,
                     {"schema_version", "name", "rho0", "delta0", "gamma0", "x0", "y0", "theta0",
                      "dt", "t_max", "cutoff_rho", "record_stride", "controller"},
                     "scenario");
  if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer() ||
      doc.at("schema_version").get<int>() != kScenarioSchemaVersion) {
    reject("schema_version must be 1");
  }
  Scenario s;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) reject("'name' must be a string");
    s.name = doc.at("name").get<std::string>();
  }
  const bool polar = doc.contains("rho0") || doc.contains("delta0") || doc.contains("gamma0");
  const bool cartesian = doc.contains("x0") || doc.contains("y0") || doc.contains("theta0");
  if (polar == cartesian) reject("give the initial state as rho0/delta0/gamma0 or x0/y0/theta0");
  if (polar) {
    s.initial = {number(doc, "rho0", "scenario"), number(doc, "delta0", "scenario"),
                 number(doc, "gamma0", "scenario")};
  } else {
    try {
      s.initial = cartesian_to_polar({number(doc, "x0", "scenario"), number(doc, "y0", "scenario"),
                                      number(doc, "theta0", "scenario")});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularOrigin) reject(e.what());
      throw;
    }
  }
  s.dt = number_or(doc, "dt", s.dt);
  s.t_max = number_or(doc, "t_max", s.t_max);
  s.cutoff_rho = number_or(doc, "cutoff_rho", s.cutoff_rho);
  if (doc.contains("record_stride")) {
    if (!doc.at("record_stride").is_number_integer()) reject("'record_stride' must be an integer");
    s.record_stride = doc.at("record_stride").get<int>();
  }
  if (!doc.contains("controller")) reject("missing 'controller'");
  s.controller = parse_controller(doc.at("controller"));
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) reject("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& scn) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["name"] = scn.name;
  doc["rho0"] = scn.initial.rho;
  doc["delta0"] = scn.initial.delta;
  doc["gamma0"] = scn.initial.gamma;
  doc["dt"] = scn.dt;
  doc["t_max"] = scn.t_max;
  doc["cutoff_rho"] = scn.cutoff_rho;
  doc["record_stride"] = scn.record_stride;
  doc["controller"] = controller_json(scn.controller);
  return doc.dump(2);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names{"fig2-bofo", "fig3-blue", "fig3-cyan", "fig3-red", "fig4",
                                 "glofo-default"};
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<Scenario> preset(std::string_view name) {
  const auto thm3 = ControllerSpec::deadbeat_power(kPowerRateGains);
  if (name == "fig3-red") {
    return {make("fig3-red", {1.0, 0.0, -kPi / 2.5}, thm3, kDeadbeatHorizon, kParkingCutoff)};
  }
  if (name == "fig3-blue") {
    return {make("fig3-blue", {1.0, -kPi / 2.0, -kPi / 2.5}, thm3, kDeadbeatHorizon, kParkingCutoff)};
  }
  if (name == "fig3-cyan") {
    return {make("fig3-cyan", {1.0, kPi, 0.0}, thm3, kDeadbeatHorizon, kParkingCutoff)};
  }
  if (name == "fig4") {
    return {make("fig4", {1.0, 0.0, -kPi / 2.5}, ControllerSpec::deadbeat_exp(kExpRateGains),
                 kDeadbeatHorizon, kParkingCutoff)};
  }
  if (name == "glofo-default") {
    return {make("glofo-default", {1.0, kPi, 0.0}, ControllerSpec::glofo(UnicycleGains{1.0, 1.0, 1.0}),
                 kUnicycleHorizon, 0.0)};
  }
  if (name == "fig2-bofo") return fig2_bofo();
  reject("unknown preset '" + std::string(name) + "'");
}

}  // namespace polarpark
