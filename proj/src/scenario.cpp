#include "sta/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sta/errors.hpp"

namespace sta {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key))
      throw ScenarioError("unknown key \"" + where + key + "\"");
  }
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ScenarioError("missing field \"" + where + key + "\"");
  if (!obj[key].is_number()) throw ScenarioError("field \"" + where + key + "\" must be a number");
  return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& where, const std::string& key,
                       double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ScenarioError("field \"" + where + key + "\" must be a number");
  return obj[key].get<double>();
}

bool optional_bool(const json& obj, const std::string& where, const std::string& key,
                   bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw ScenarioError("field \"" + where + key + "\" must be a boolean");
  return obj[key].get<bool>();
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ScenarioError("scenario root must be a JSON object");
  reject_unknown(root, "", {"schema_version", "trap", "protocol", "constraints",
                            "simulation", "doublewell"});

  if (!root.contains("schema_version") || !root["schema_version"].is_string() ||
      root["schema_version"].get<std::string>() != "1")
    throw ScenarioError("field \"schema_version\" must be the string \"1\"");

  Scenario sc;

  if (!root.contains("protocol") || !root["protocol"].is_object())
    throw ScenarioError("missing object \"protocol\"");
  const json& proto = root["protocol"];
  reject_unknown(proto, "protocol.", {"mode", "t_f_s", "n_samples"});
  if (!proto.contains("mode") || !proto["mode"].is_string())
    throw ScenarioError("missing field \"protocol.mode\"");
  const std::string mode = proto["mode"].get<std::string>();
  if (mode == "transport") sc.mode = ProtocolMode::transport;
  else if (mode == "launch") sc.mode = ProtocolMode::launch;
  else if (mode == "arbitrary") sc.mode = ProtocolMode::arbitrary;
  else if (mode == "doublewell") sc.mode = ProtocolMode::doublewell;
  else throw ScenarioError("field \"protocol.mode\" must be transport|launch|arbitrary|doublewell");
  sc.t_f = require_number(proto, "protocol.", "t_f_s");
  if (!(sc.t_f > 0.0)) throw ScenarioError("field \"protocol.t_f_s\" must be positive");
  sc.n_samples = static_cast<int>(optional_number(proto, "protocol.", "n_samples", 2001));
  if (sc.n_samples < 2) throw ScenarioError("field \"protocol.n_samples\" must be at least 2");

  if (!root.contains("trap") || !root["trap"].is_object())
    throw ScenarioError("missing object \"trap\"");
  const json& trap = root["trap"];
  reject_unknown(trap, "trap.", {"mass_kg", "omega0_rad_s", "gamma", "d_m", "v_f_m_s",
                                 "epsilon_per_s", "harmonic"});
  sc.trap.mass = require_number(trap, "trap.", "mass_kg");
  sc.trap.omega0 = optional_number(trap, "trap.", "omega0_rad_s", 0.0);
  sc.trap.gamma = optional_number(trap, "trap.", "gamma", 1.0);
  sc.trap.d = optional_number(trap, "trap.", "d_m", 0.0);
  sc.trap.v_f = optional_number(trap, "trap.", "v_f_m_s", 0.0);
  sc.trap.epsilon = optional_number(trap, "trap.", "epsilon_per_s", 0.0);
  const bool harmonic_mode =
      sc.mode == ProtocolMode::transport || sc.mode == ProtocolMode::launch;
  sc.trap.harmonic = optional_bool(trap, "trap.", "harmonic", harmonic_mode);
  if (sc.trap.harmonic != harmonic_mode)
    throw ScenarioError("field \"trap.harmonic\" conflicts with \"protocol.mode\"");
  if (sc.mode == ProtocolMode::transport && sc.trap.v_f != 0.0)
    throw ScenarioError("field \"trap.v_f_m_s\" must be 0 in transport mode");
  try {
    sc.trap.validate();
  } catch (const StaError& e) {
    throw ScenarioError(std::string("invalid \"trap\": ") + e.what());
  }

  if (root.contains("constraints")) {
    const json& con = root["constraints"];
    if (!con.is_object()) throw ScenarioError("\"constraints\" must be an object");
    reject_unknown(con, "constraints.", {"real_frequency", "box", "tol_box_m"});
    sc.constraints.real_frequency = optional_bool(con, "constraints.", "real_frequency", true);
    sc.constraints.box = optional_bool(con, "constraints.", "box", true);
    sc.constraints.tol_box = optional_number(con, "constraints.", "tol_box_m", -1.0);
  }

  if (root.contains("simulation")) {
    const json& sim = root["simulation"];
    if (!sim.is_object()) throw ScenarioError("\"simulation\" must be an object");
    reject_unknown(sim, "simulation.", {"n_points", "n_steps", "box_half_width_m"});
    sc.simulation.n_points = static_cast<int>(optional_number(sim, "simulation.", "n_points", 0));
    sc.simulation.n_steps = static_cast<int>(optional_number(sim, "simulation.", "n_steps", 0));
    sc.simulation.box_half_width = optional_number(sim, "simulation.", "box_half_width_m", 0.0);
  }

  if (root.contains("doublewell")) {
    const json& dw = root["doublewell"];
    if (!dw.is_object()) throw ScenarioError("\"doublewell\" must be an object");
    reject_unknown(dw, "doublewell.", {"beta_N_m3", "lambda_N_m", "mu_N"});
    DoubleWellParams p;
    p.beta = require_number(dw, "doublewell.", "beta_N_m3");
    p.lambda = require_number(dw, "doublewell.", "lambda_N_m");
    p.mu = optional_number(dw, "doublewell.", "mu_N", 0.0);
    p.mass = sc.trap.mass;
    try {
      p.validate();
    } catch (const StaError& e) {
      throw ScenarioError(std::string("invalid \"doublewell\": ") + e.what());
    }
    sc.doublewell = p;
  }
  if (sc.mode == ProtocolMode::doublewell && !sc.doublewell)
    throw ScenarioError("doublewell mode requires the \"doublewell\" object (or a CLI preset)");

  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace sta
