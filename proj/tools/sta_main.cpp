#include <string>

#include <CLI11.hpp>

#include "sta/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Shortcut-to-adiabaticity designer and verifier for dual-task "
               "transport and expansion protocols"};
  app.require_subcommand(1);

  std::string scenario, out, constraint = "both", mode = "dual", preset;
  sta::cli::VerifyOptions verify_opts;
  sta::cli::DoublewellOptions dw_opts;
  bool json_output = false;

  auto* design = app.add_subcommand("design", "Inverse-engineer control signals");
  design->add_option("scenario", scenario, "Scenario JSON file")->required();
  design->add_option("--out", out, "Output base path (writes .csv and .json)")->required();

  auto* mintime = app.add_subcommand("mintime", "Constraint-limited minimal protocol time");
  mintime->add_option("scenario", scenario, "Scenario JSON file")->required();
  mintime->add_option("--constraint", constraint, "freq|box|both")
      ->check(CLI::IsMember({"freq", "box", "both"}));
  mintime->add_flag("--json", json_output, "Machine-readable output");

  auto* verify = app.add_subcommand("verify", "Propagate the Schrodinger equation and score fidelity");
  verify->add_option("scenario", scenario, "Scenario JSON file")->required();
  verify->add_option("--state", verify_opts.states, "Eigenstate indices, e.g. 0 or 0,1");
  verify->add_option("--fidelity-threshold", verify_opts.fidelity_threshold,
                     "Pass threshold (default 0.999)");
  verify->add_option("--out", verify_opts.out_path, "Verification report JSON");
  verify->add_option("--controls", verify_opts.controls_base,
                     "Re-ingest a design output (base path of .csv/.json pair)");
  verify->add_option("--snapshots", verify_opts.snapshots, "Wavefunction snapshot count");

  auto* sweep = app.add_subcommand("sweep", "Exceeded-distance sweep over final times");
  sweep->add_option("scenario", scenario, "Scenario JSON file")->required();
  sweep->add_option("--mode", mode, "dual|sequential")
      ->check(CLI::IsMember({"dual", "sequential"}));
  sweep->add_option("--out", out, "Output CSV path")->required();

  auto* dwell = app.add_subcommand("doublewell", "Double-well differential launching report");
  dwell->add_option("scenario", scenario, "Scenario JSON file")->required();
  dwell->add_option("--preset", preset, "fig3|fig4 parameter preset")
      ->check(CLI::IsMember({"fig3", "fig4"}));
  dwell->add_option("--out", out, "Output base path")->required();
  dwell->add_flag("--simulate", dw_opts.simulate, "Add the numerical cross-check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // exit-code contract: 1 on any input error
  }

  if (design->parsed()) return sta::cli::cmd_design(scenario, out);
  if (mintime->parsed()) return sta::cli::cmd_mintime(scenario, constraint, json_output);
  if (verify->parsed()) return sta::cli::cmd_verify(scenario, verify_opts);
  if (sweep->parsed()) return sta::cli::cmd_sweep(scenario, mode, out);
  if (dwell->parsed()) {
    dw_opts.preset = preset;
    dw_opts.out_base = out;
    return sta::cli::cmd_doublewell(scenario, dw_opts);
  }
  return 1;
}
