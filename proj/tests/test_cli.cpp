#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sta/cli.hpp"
#include "sta/errors.hpp"
#include "sta/scenario.hpp"

using namespace sta;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sta_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string dual_transport_scenario(double t_f_us) {
  std::ostringstream s;
  s << R"({
  "schema_version": "1",
  "trap": {"mass_kg": 1.4965082113e-26, "omega0_rad_s": 1.2566370614359172e7,
           "gamma": 3.1622776601683795, "d_m": 370e-6},
  "protocol": {"mode": "transport", "t_f_s": )"
    << t_f_us << R"(e-6, "n_samples": 2001}
})";
  return s.str();
}

const char* rigid_verify_scenario = R"({
  "schema_version": "1",
  "trap": {"mass_kg": 1.4965082113e-26, "omega0_rad_s": 1.2566370614359172e7,
           "gamma": 1.0, "d_m": 2e-5},
  "protocol": {"mode": "transport", "t_f_s": 0.3e-6, "n_samples": 2001},
  "simulation": {"n_points": 256}
})";

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("scenario parsing accepts the documented schema and nothing else") {
  CHECK_NOTHROW(parse_scenario(dual_transport_scenario(1.05)));

  CHECK_THROWS_AS(parse_scenario("{"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version":"2","trap":{},"protocol":{}})"),
                  ScenarioError);

  // unknown keys are rejected with the offending name
  try {
    parse_scenario(R"({
      "schema_version": "1",
      "trap": {"mass_kg": 1e-26, "omega0_rad_s": 1e7, "gamme": 2.0},
      "protocol": {"mode": "transport", "t_f_s": 1e-6}
    })");
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("gamme") != std::string::npos);
  }

  // invalid physics is a validation error
  CHECK_THROWS_AS(parse_scenario(R"({
      "schema_version": "1",
      "trap": {"mass_kg": 1e-26, "omega0_rad_s": 1e7, "gamma": 0.0},
      "protocol": {"mode": "transport", "t_f_s": 1e-6}
    })"),
                  ScenarioError);

  // transport mode with a launch velocity is inconsistent
  CHECK_THROWS_AS(parse_scenario(R"({
      "schema_version": "1",
      "trap": {"mass_kg": 1e-26, "omega0_rad_s": 1e7, "v_f_m_s": 1.0},
      "protocol": {"mode": "transport", "t_f_s": 1e-6}
    })"),
                  ScenarioError);

  // doublewell mode needs the parameter block
  CHECK_THROWS_AS(parse_scenario(R"({
      "schema_version": "1",
      "trap": {"mass_kg": 1e-26},
      "protocol": {"mode": "doublewell", "t_f_s": 1e-6}
    })"),
                  ScenarioError);
}

TEST_CASE("design exit codes follow the feasibility verdict") {
  TempDir tmp;
  const std::string feasible = tmp.file("ok.json");
  write(feasible, dual_transport_scenario(1.05));
  CHECK(cli::cmd_design(feasible, tmp.file("ok_out")) == 0);

  // at the quoted sub-threshold durations the trap center leaves the box
  const std::string tight = tmp.file("tight.json");
  write(tight, dual_transport_scenario(0.91));
  CHECK(cli::cmd_design(tight, tmp.file("tight_out")) == 2);
  CHECK(fs::exists(tmp.file("tight_out.csv")));  // output still written

  const std::string bad = tmp.file("bad.json");
  write(bad, "{\"schema_version\": \"1\"");
  CHECK(cli::cmd_design(bad, tmp.file("bad_out")) == 1);

  const json meta = json::parse(slurp(tmp.file("tight_out.json")));
  CHECK(meta.at("feasible").get<bool>() == false);
  CHECK(meta.at("constraint_report").at("box_ok").get<bool>() == false);
  CHECK(meta.at("constraint_report").at("real_frequency_ok").get<bool>() == true);
}

TEST_CASE("design output is deterministic") {
  TempDir tmp;
  const std::string scenario = tmp.file("s.json");
  write(scenario, dual_transport_scenario(1.05));
  REQUIRE(cli::cmd_design(scenario, tmp.file("a")) == 0);
  REQUIRE(cli::cmd_design(scenario, tmp.file("b")) == 0);
  CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));
  CHECK(slurp(tmp.file("a.json")) == slurp(tmp.file("b.json")));
}

TEST_CASE("verification round-trips through the design files") {
  TempDir tmp;
  const std::string scenario = tmp.file("s.json");
  write(scenario, rigid_verify_scenario);

  REQUIRE(cli::cmd_design(scenario, tmp.file("design")) == 0);

  cli::VerifyOptions direct;
  direct.out_path = tmp.file("direct.json");
  REQUIRE(cli::cmd_verify(scenario, direct) == 0);

  cli::VerifyOptions reingested;
  reingested.out_path = tmp.file("reingested.json");
  reingested.controls_base = tmp.file("design");
  REQUIRE(cli::cmd_verify(scenario, reingested) == 0);

  const json a = json::parse(slurp(tmp.file("direct.json")));
  const json b = json::parse(slurp(tmp.file("reingested.json")));
  // 1e-12 agreement relative to each observable's physical scale (the mean
  // velocity of a transport end point is zero, so its scale is d/t_f)
  const struct {
    const char* key;
    double scale;
  } fields[] = {{"fidelity", 1.0},
                {"mean_velocity_m_s", 2e-5 / 0.3e-6},
                {"velocity_dispersion_m_s", 0.0},
                {"energy_J", 0.0}};
  for (const auto& f : fields) {
    const double va = a.at("statistics")[0].at(f.key).get<double>();
    const double vb = b.at("statistics")[0].at(f.key).get<double>();
    const double scale = f.scale > 0.0 ? f.scale : std::abs(va);
    CHECK(std::abs(vb - va) <= 1e-12 * scale);
  }
}

TEST_CASE("corrupted control tables fail verification") {
  TempDir tmp;
  const std::string scenario = tmp.file("s.json");
  write(scenario, rigid_verify_scenario);
  REQUIRE(cli::cmd_design(scenario, tmp.file("design")) == 0);

  // flip the sign of the sampled frequency over the middle of the ramp
  std::istringstream in(slurp(tmp.file("design.csv")));
  std::ostringstream out;
  std::string line;
  int row = -1, rows = 2001;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row;
    if (row > 0 && row > static_cast<int>(0.4 * rows) && row < static_cast<int>(0.6 * rows)) {
      const auto comma = line.find(',');
      const auto comma2 = line.find(',', comma + 1);
      const double w2 = std::stod(line.substr(comma + 1, comma2 - comma - 1));
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12e", -w2);
      line = line.substr(0, comma + 1) + buf + line.substr(comma2);
    }
    out << line << "\r\n";
  }
  write(tmp.file("design.csv"), out.str());

  cli::VerifyOptions opts;
  opts.controls_base = tmp.file("design");
  CHECK(cli::cmd_verify(scenario, opts) == 3);
}

TEST_CASE("mintime reports an unconstrained bracket floor as zero") {
  TempDir tmp;
  const std::string scenario = tmp.file("hold.json");
  write(scenario, R"({
    "schema_version": "1",
    "trap": {"mass_kg": 1.4965082113e-26, "omega0_rad_s": 1.2566370614359172e7,
             "gamma": 1.0},
    "protocol": {"mode": "transport", "t_f_s": 1e-6}
  })");

  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  const int rc = cli::cmd_mintime(scenario, "freq", true);
  std::cout.rdbuf(old);
  REQUIRE(rc == 0);
  const json out = json::parse(captured.str());
  CHECK(out.at("unconstrained").get<bool>());
  CHECK(out.at("minimal_time_s").get<double>() == 0.0);
}

TEST_CASE("mintime prints the expansion threshold") {
  TempDir tmp;
  const std::string scenario = tmp.file("exp.json");
  write(scenario, R"({
    "schema_version": "1",
    "trap": {"mass_kg": 1.4965082113e-26, "omega0_rad_s": 1.2566370614359172e7,
             "gamma": 3.1622776601683795},
    "protocol": {"mode": "transport", "t_f_s": 1e-6}
  })");
  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  const int rc = cli::cmd_mintime(scenario, "freq", true);
  std::cout.rdbuf(old);
  REQUIRE(rc == 0);
  const json out = json::parse(captured.str());
  CHECK(out.at("minimal_time_s").get<double>() ==
        doctest::Approx(0.442077e-6).epsilon(1e-3));
}

TEST_CASE("sweep writes the thirty-point table and honors STA_THREADS") {
  TempDir tmp;
  const std::string scenario = tmp.file("s.json");
  write(scenario, dual_transport_scenario(1.0));

  setenv("STA_THREADS", "3", 1);
  REQUIRE(cli::cmd_sweep(scenario, "dual", tmp.file("dual.csv")) == 0);
  setenv("STA_THREADS", "1", 1);
  REQUIRE(cli::cmd_sweep(scenario, "dual", tmp.file("dual_serial.csv")) == 0);
  unsetenv("STA_THREADS");

  const std::string csv = slurp(tmp.file("dual.csv"));
  CHECK(count_lines(csv) == 31);  // header + 30 rows
  CHECK(csv == slurp(tmp.file("dual_serial.csv")));

  REQUIRE(cli::cmd_sweep(scenario, "sequential", tmp.file("seq.csv")) == 0);
  CHECK(count_lines(slurp(tmp.file("seq.csv"))) == 31);
}

TEST_CASE("doublewell preset emits report, trajectory and snapshots") {
  TempDir tmp;
  const std::string scenario = tmp.file("dw.json");
  write(scenario, R"({
    "schema_version": "1",
    "trap": {"mass_kg": 1.4965082113e-26, "gamma": 1.7320508075688772,
             "d_m": 370e-6, "v_f_m_s": 10.0, "epsilon_per_s": 2.0},
    "protocol": {"mode": "doublewell", "t_f_s": 1e-6},
    "doublewell": {"beta_N_m3": 5.2e-3, "lambda_N_m": -4.7e-12, "mu_N": 86.4e-21}
  })");

  cli::DoublewellOptions opts;
  opts.preset = "fig4";
  opts.out_base = tmp.file("dw");
  REQUIRE(cli::cmd_doublewell(scenario, opts) == 0);

  const json report = json::parse(slurp(tmp.file("dw_report.json")));
  CHECK(report.at("report").at("v_plus_m_s").get<double>() ==
        doctest::Approx(10.000042508).epsilon(1e-9));
  CHECK(report.at("report").at("v_minus_m_s").get<double>() ==
        doctest::Approx(9.999957474).epsilon(1e-9));
  CHECK(report.at("report").at("separated").get<bool>() == false);

  CHECK(count_lines(slurp(tmp.file("dw_alpha.csv"))) == 502);
  for (int k = 0; k < 9; ++k)
    CHECK(fs::exists(tmp.file("dw_potential_" + std::to_string(k) + ".csv")));

  // at the boundary times the left well is the deeper one: after the shift
  // that zeroes the left minimum, the right half of the table stays positive
  for (const char* name : {"dw_potential_0.csv", "dw_potential_8.csv"}) {
    std::istringstream in(slurp(tmp.file(name)));
    std::string line;
    std::getline(in, line);  // header
    double right_min = 1e300, left_min = 1e300;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      const double x = std::stod(line.substr(0, comma));
      const double v = std::stod(line.substr(comma + 1));
      if (x > 0.01) right_min = std::min(right_min, v);
      if (x < -0.01) left_min = std::min(left_min, v);
    }
    // the shift puts the exact left minimum at zero; the sampled minimum sits
    // a hair above it, far below the mu-induced bias between the wells
    CHECK(left_min >= 0.0);
    CHECK(left_min < 1e-24);
    CHECK(right_min - left_min > 1e-24);
  }
}
