/******************************************************************************
 * Copyright 2026 The ghxctl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include "ghxctl/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdlib>
#include <sstream>

#include <doctest.h>

using namespace ghxctl;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("ghxctl_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// short-horizon scenario so the suite stays fast
ScenarioConfig quick(const std::string& preset) {
  ScenarioConfig c = preset_scenario(preset);
  c.horizon = 1200.0;
  return c;
}

struct CsvData {
  std::vector<double> t;
  std::vector<Mat> x, xr, u, e;
  std::vector<double> v;
};

CsvData parse_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "t,x0,x1,xr0,xr1,u0,u1,e0,e1,V");
  CsvData data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double vals[10];
    char comma;
    ss >> vals[0];
    for (int i = 1; i < 10; ++i) ss >> comma >> vals[i];
    REQUIRE(bool(ss));
    data.t.push_back(vals[0]);
    data.x.push_back(Mat::col({vals[1], vals[2]}));
    data.xr.push_back(Mat::col({vals[3], vals[4]}));
    data.u.push_back(Mat::col({vals[5], vals[6]}));
    data.e.push_back(Mat::col({vals[7], vals[8]}));
    data.v.push_back(vals[9]);
  }
  return data;
}

}  // namespace

TEST_CASE("synthetic target is deterministic and seed-sensitive") {
  const TargetFn t1 = synthetic_reference_target(5250.0, 1.0, 42);
  const TargetFn t2 = synthetic_reference_target(5250.0, 1.0, 42);
  const TargetFn t3 = synthetic_reference_target(5250.0, 1.0, 43);
  bool any_diff = false;
  for (double t = 0.0; t <= 5250.0; t += 97.0) {
    CHECK(frobenius_norm(t1(t) - t2(t)) == 0.0);
    if (frobenius_norm(t1(t) - t3(t)) > 0.0) any_diff = true;
  }
  CHECK(any_diff);
  CHECK_THROWS_AS(synthetic_reference_target(500.0, 1.0, 1), ConfigError);
}

TEST_CASE("constant target equals an equilibrium hold") {
  const PlantModel ghx = nominal_ghx_model();
  const Mat x_eq = solve_linear(ghx.a, -1.0 * ghx.d);
  const TargetFn hold = constant_target(x_eq);
  CHECK(frobenius_norm(hold(0.0) - x_eq) == 0.0);
  CHECK(frobenius_norm(hold(9999.0) - x_eq) == 0.0);
}

TEST_CASE("nominal LQR tracks the default profile within 5% of its range") {
  const PlantModel model = nominal_ghx_model();
  const LqrDesign design = design_lqr(model, 10.0 * Mat::identity(2), 1000.0 * Mat::identity(2));
  const double horizon = 5250.0, dt = 1.0;
  const TargetFn target = synthetic_reference_target(horizon, dt, 42);
  const ReferenceTrajectory ref = generate_reference(design, model, target, horizon, dt);

  double range0 = 0.0, range1 = 0.0;
  double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
  for (double t = 0.0; t <= horizon; t += dt) {
    const Mat v = target(t);
    lo0 = std::min(lo0, v(0, 0)); hi0 = std::max(hi0, v(0, 0));
    lo1 = std::min(lo1, v(1, 0)); hi1 = std::max(hi1, v(1, 0));
  }
  range0 = hi0 - lo0;
  range1 = hi1 - lo1;
  // skip the initial transient
  for (std::size_t i = 200; i < ref.size(); ++i) {
    const Mat dev = ref.x_r[i] - target(ref.times[i]);
    CHECK(std::abs(dev(0, 0)) <= 0.05 * range0);
    CHECK(std::abs(dev(1, 0)) <= 0.05 * range1);
  }
}

TEST_CASE("scenario presets") {
  CHECK(preset_scenario("nominal").multiplier == 1.0);
  CHECK(preset_scenario("perturbed").multiplier == 1.5);
  CHECK(preset_scenario("perturbed_matched").theta_lr_preset == ThetaLrPreset::identity);
  CHECK(preset_scenario("disturbed").sigma == 1e-3);
  CHECK(preset_scenario("disturbed").disturbance.kind == DisturbanceSignal::Kind::chirp);
  CHECK(preset_scenario("disturbed_matched").basis == BasisKind::sine);
  // figure-legend aliases resolve to the perturbed scenario
  CHECK(preset_scenario("perturbed_no_ac").name == "perturbed");
  CHECK(preset_scenario("perturbed_ac").name == "perturbed");
  CHECK(preset_scenario("perturbed_ac_explicit_d").name == "perturbed");
  CHECK_THROWS_AS(preset_scenario("bogus"), ConfigError);
}

TEST_CASE("config file loading") {
  const std::string dir = temp_dir("config");
  const std::string good = dir + "/good.json";
  {
    std::ofstream out(good);
    out << R"({"name":"custom","multiplier":1.25,"basis":"sine",
               "theta_lr_preset":"identity","sigma":0.001,
               "disturbance":{"kind":"chirp","amplitude":0.05,"f0":0.001,"f1":0.01},
               "horizon":2000.0,"dt":1.0,"seed":7,
               "lqr":{"q_scale":10.0,"r_scale":1000.0},
               "adaptive":{"gamma_scale":1.0,"q_lyap_scale":1e-6},
               "init":{"lambda_scale":0.8,"theta_lr_scale":0.75},
               "reference":"synthetic"})";
  }
  const ScenarioConfig c = load_config(good);
  CHECK(c.name == "custom");
  CHECK(c.multiplier == 1.25);
  CHECK(c.basis == BasisKind::sine);
  CHECK(c.theta_lr_preset == ThetaLrPreset::identity);
  CHECK(c.disturbance.kind == DisturbanceSignal::Kind::chirp);
  CHECK(c.disturbance.horizon == 2000.0);
  CHECK(c.seed == 7);

  const std::string unknown = dir + "/unknown.json";
  {
    std::ofstream out(unknown);
    out << R"({"multiplierr":1.5})";
  }
  CHECK_THROWS_AS(load_config(unknown), ConfigError);

  const std::string bad = dir + "/bad.json";
  {
    std::ofstream out(bad);
    out << R"({"multiplier": "fast"})";
  }
  CHECK_THROWS_AS(load_config(bad), ConfigError);
  CHECK_THROWS_AS(load_config(dir + "/missing.json"), ConfigError);
}

TEST_CASE("csv reference ingestion") {
  const std::string dir = temp_dir("ingest");

  SUBCASE("a quadratic survives the order-2 filter") {
    const std::string path = dir + "/quad.csv";
    {
      std::ofstream out(path);
      out << "t,x0,x1\n";
      for (int i = 0; i <= 400; ++i) {
        const double t = i;
        out << t << "," << (0.2 + 0.01 * t - 1e-5 * t * t) << "," << (5.0 + 0.05 * t) << "\n";
      }
    }
    const IngestedTarget tgt = ingest_csv_reference(path, 1.0, 51, 2);
    REQUIRE(tgt.values.size() == 401);
    for (std::size_t i = 0; i < tgt.values.size(); ++i) {
      const double t = tgt.times[i];
      CHECK(std::abs(tgt.values[i](0, 0) - (0.2 + 0.01 * t - 1e-5 * t * t)) <= 1e-9);
      CHECK(std::abs(tgt.values[i](1, 0) - (5.0 + 0.05 * t)) <= 1e-9);
    }
  }
  SUBCASE("duplicated timestamp names the row") {
    const std::string path = dir + "/dup.csv";
    {
      std::ofstream out(path);
      out << "t,x0,x1\n0,1,2\n1,1,2\n1,1,2\n2,1,2\n";
    }
    try {
      ingest_csv_reference(path, 1.0, 3, 2);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("row 4") != std::string::npos);
    }
  }
  SUBCASE("malformed row names the row") {
    const std::string path = dir + "/bad.csv";
    {
      std::ofstream out(path);
      out << "t,x0,x1\n0,1,2\n1,oops,2\n";
    }
    try {
      ingest_csv_reference(path, 1.0, 3, 2);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  SUBCASE("fewer samples than the window") {
    const std::string path = dir + "/short.csv";
    {
      std::ofstream out(path);
      out << "t,x0,x1\n0,1,2\n1,1,2\n2,1,2\n";
    }
    CHECK_THROWS_AS(ingest_csv_reference(path, 1.0, 5, 2), ConfigError);
  }
}

TEST_CASE("degenerate scenario: runs b, c, d reproduce run a") {
  const std::string dir = temp_dir("degenerate");
  const RunArtifacts art = run_scenario(quick("nominal"), dir);
  REQUIRE(art.runs.size() == 4);
  const auto& a = art.runs[0].record;
  for (std::size_t r = 1; r < art.runs.size(); ++r) {
    const auto& other = art.runs[r].record;
    REQUIRE(other.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(other.x[i](0, 0) - a.x[i](0, 0)) <= 1e-6);
      CHECK(std::abs(other.x[i](1, 0) - a.x[i](1, 0)) <= 1e-6);
    }
  }
}

TEST_CASE("determinism: identical config and seed give byte-identical CSVs") {
  const std::string dir1 = temp_dir("det1");
  const std::string dir2 = temp_dir("det2");
  const ScenarioConfig c = quick("perturbed");
  const RunArtifacts a1 = run_scenario(c, dir1);
  const RunArtifacts a2 = run_scenario(c, dir2);
  REQUIRE(a1.runs.size() == a2.runs.size());
  for (std::size_t r = 0; r < a1.runs.size(); ++r) {
    CHECK(slurp(a1.runs[r].csv_path) == slurp(a2.runs[r].csv_path));
  }
}

TEST_CASE("summary metrics are recomputable from the emitted CSVs") {
  const std::string dir = temp_dir("recompute");
  const RunArtifacts art = run_scenario(quick("perturbed"), dir);

  // the target is recoverable from run a's comparison columns
  const CsvData run_a = parse_trajectory_csv(art.runs[0].csv_path);
  for (std::size_t r = 0; r < art.runs.size(); ++r) {
    const CsvData data = parse_trajectory_csv(art.runs[r].csv_path);
    REQUIRE(data.t.size() == run_a.t.size());
    std::vector<Mat> err;
    for (std::size_t i = 0; i < data.t.size(); ++i) err.push_back(data.x[i] - run_a.xr[i]);
    const auto m = mae(err);
    const auto it = itae(err, data.t);
    const double ce1 = control_effort(data.u, data.t, 1);
    const double ce2 = control_effort(data.u, data.t, 2);
    for (std::size_t s = 0; s < 2; ++s) {
      CHECK(std::abs(m[s] - art.runs[r].metrics.mae[s]) <= 1e-9);
      CHECK(std::abs(it[s] - art.runs[r].metrics.itae[s]) <=
            1e-9 * std::max(1.0, art.runs[r].metrics.itae[s]));
    }
    CHECK(std::abs(ce1 - art.runs[r].metrics.ce_l1) <= 1e-9 * std::max(1.0, ce1));
    CHECK(std::abs(ce2 - art.runs[r].metrics.ce_l2) <= 1e-9 * std::max(1.0, ce2));
  }
}

TEST_CASE("single-point sweep self-normalizes to one") {
  const std::string dir = temp_dir("sweep1");
  ScenarioConfig c = quick("perturbed");
  const SweepSummary sweep = run_multiplier_sweep(c, {1.0}, dir);
  REQUIRE(sweep.points.size() == 2);
  for (const SweepPoint& p : sweep.points) {
    REQUIRE(p.ok);
    if (!p.matched) {
      CHECK(p.metrics.ce_l2_norm == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(p.metrics.mae_norm[0] == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(p.metrics.mae_norm[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(fs::exists(sweep.csv_path));
  CHECK(fs::exists(sweep.json_path));
}

TEST_CASE("sweep validates its multiplier list") {
  ScenarioConfig c = quick("perturbed");
  CHECK_THROWS_AS(run_multiplier_sweep(c, {}, "/tmp/ghxctl_never"), ConfigError);
  CHECK_THROWS_AS(run_multiplier_sweep(c, {0.5, 1.0}, "/tmp/ghxctl_never"), ConfigError);
  CHECK_THROWS_AS(run_multiplier_sweep(c, {1.5, 1.2}, "/tmp/ghxctl_never"), ConfigError);
}

TEST_CASE("default 50% scenario: AC beats the bare LQR gain on both states") {
  const std::string dir = temp_dir("benefit");
  const RunArtifacts art = run_scenario(preset_scenario("perturbed"), dir);
  const MetricsSummary& b = art.runs[1].metrics;
  const MetricsSummary& c = art.runs[2].metrics;
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(c.mae[s] < b.mae[s]);
    CHECK(c.mae_norm[s] < b.mae_norm[s]);
  }
}

TEST_CASE("a CSV reference drives the whole scenario") {
  const std::string dir = temp_dir("csvref");
  const std::string csv = dir + "/target.csv";
  // sample the synthetic profile into the external-reference format
  const TargetFn target = synthetic_reference_target(1500.0, 1.0, 42);
  {
    std::ofstream out(csv);
    out << "t,x0,x1\n";
    for (int i = 0; i <= 1500; ++i) {
      const Mat v = target(static_cast<double>(i));
      out << i << "," << v(0, 0) << "," << v(1, 0) << "\n";
    }
  }
  ScenarioConfig c = quick("perturbed");
  c.reference = csv;
  c.horizon = 1400.0;
  c.savgol_window = 51;
  const RunArtifacts art = run_scenario(c, dir + "/out");
  REQUIRE(art.runs.size() == 4);
  CHECK(art.runs[0].record.size() == 1401);
  // the nominal run still tracks the ingested target closely
  CHECK(art.runs[0].metrics.mae[0] < 0.05);
}

#ifdef GHXCTL_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GHXCTL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("CLI exit codes") {
  const std::string dir = temp_dir("cli");
  CHECK(run_cli("--scenario nominal --out-dir " + dir + "/ok") == 0);
  CHECK(run_cli("--scenario perturbed --multiplier 1.25 --seed 9 --out-dir " + dir + "/ovr") ==
        0);
  CHECK(run_cli("--scenario no_such_preset --out-dir " + dir + "/bad") == 2);
  CHECK(run_cli("--sweep 2.0:1.0:0.5 --out-dir " + dir + "/badsweep") == 2);

  // numerical failure: an absurd adaptation gain trips the divergence guard
  const std::string cfg = dir + "/hot.json";
  {
    std::ofstream out(cfg);
    out << R"({"name":"hot","multiplier":1.5,"horizon":2000.0,
               "adaptive":{"gamma_scale":1e9,"q_lyap_scale":1e-6}})";
  }
  CHECK(run_cli("--config " + cfg + " --out-dir " + dir + "/hot") == 3);
}
#endif
