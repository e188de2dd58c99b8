#pragma once

#include <optional>
#include <string>

#include "sta/doublewell.hpp"
#include "sta/protocol.hpp"

namespace sta {

enum class ProtocolMode { transport, launch, arbitrary, doublewell };

struct ConstraintOptions {
  bool real_frequency = true;
  bool box = true;
  double tol_box = -1.0;  // meters; < 0 selects the default
};

struct SimulationOptions {
  int n_points = 0;             // 0 selects the default
  int n_steps = 0;              // 0 selects the resolution-rule count
  double box_half_width = 0.0;  // meters; 0 selects the default
};

// JSON scenario file, schema_version "1". All quantities are SI; unknown keys
// are rejected.
struct Scenario {
  TrapSpec trap;
  ProtocolMode mode = ProtocolMode::transport;
  double t_f = 0.0;
  int n_samples = 2001;
  ConstraintOptions constraints;
  SimulationOptions simulation;
  std::optional<DoubleWellParams> doublewell;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

}  // namespace sta
