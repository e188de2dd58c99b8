#pragma once

#include <string>

namespace sta::cli {

// Exit codes shared by all subcommands:
//   0 success, 1 input/validation error, 2 constraint violation,
//   3 verification (fidelity) failure.

int cmd_design(const std::string& scenario_path, const std::string& out_base);

int cmd_mintime(const std::string& scenario_path, const std::string& constraint,
                bool json_output);

struct VerifyOptions {
  std::string states = "0";        // comma-separated eigenstate indices
  double fidelity_threshold = 0.999;
  std::string out_path;            // JSON report ("" = stdout only)
  std::string controls_base;       // re-ingest a design output (base.csv + base.json)
  int snapshots = 0;               // wavefunction snapshot count
};
int cmd_verify(const std::string& scenario_path, const VerifyOptions& options);

int cmd_sweep(const std::string& scenario_path, const std::string& mode,
              const std::string& out_path);

struct DoublewellOptions {
  std::string preset;   // "", "fig3" or "fig4"
  std::string out_base;
  bool simulate = false;
};
int cmd_doublewell(const std::string& scenario_path, const DoublewellOptions& options);

int sweep_thread_count();  // STA_THREADS override, default hardware concurrency

}  // namespace sta::cli
