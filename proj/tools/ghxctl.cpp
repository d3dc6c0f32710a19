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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ghxctl/scenario.hpp"

namespace {

std::vector<double> parse_sweep_range(const std::string& spec) {
  // a:b:step
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ghxctl::ConfigError("--sweep expects a:b:step, got '" + spec + "'");
  }
  double a = 0, b = 0, step = 0;
  try {
    a = std::stod(spec.substr(0, c1));
    b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ghxctl::ConfigError("--sweep expects numeric a:b:step, got '" + spec + "'");
  }
  if (!(step > 0) || b < a) throw ghxctl::ConfigError("--sweep requires b >= a and step > 0");
  std::vector<double> out;
  for (double v = a; v <= b + 1e-12; v += step) out.push_back(v);
  return out;
}

void emit_failure(const char* kind, const std::string& detail) {
  nlohmann::json j{{"error", kind}, {"detail", detail}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-control scenario runner for the identified glycol heat exchanger"};

  std::string scenario = "perturbed";
  std::string config_path;
  std::string out_dir = "out";
  std::optional<double> multiplier;
  std::optional<std::uint64_t> seed;
  std::string sweep_spec;
  std::string reference_csv;

  app.add_option("--scenario", scenario,
                 "Scenario preset (nominal, perturbed, perturbed_matched, disturbed, "
                 "disturbed_matched)");
  app.add_option("--config", config_path, "JSON config file (overrides --scenario)");
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--multiplier", multiplier, "Uncertainty multiplier override");
  app.add_option("--seed", seed, "Seed override");
  app.add_option("--sweep", sweep_spec, "Multiplier sweep a:b:step (runs both settings)");
  app.add_option("--reference-csv", reference_csv, "Track a t,x0,x1 CSV instead of the synthetic target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    emit_failure("config", e.what());
    return 2;
  }

  try {
    ghxctl::ScenarioConfig config = config_path.empty()
                                        ? ghxctl::preset_scenario(scenario)
                                        : ghxctl::load_config(config_path);
    if (multiplier) config.multiplier = *multiplier;
    if (seed) config.seed = *seed;
    if (!reference_csv.empty()) config.reference = reference_csv;

    if (!sweep_spec.empty()) {
      const auto multipliers = parse_sweep_range(sweep_spec);
      const auto sweep = ghxctl::run_multiplier_sweep(config, multipliers, out_dir);
      std::size_t failures = 0;
      for (const auto& p : sweep.points) {
        std::printf("multiplier %-6g %-8s %s\n", p.multiplier, p.matched ? "matched" : "plain",
                    p.ok ? "ok" : ("FAILED: " + p.error).c_str());
        if (!p.ok) ++failures;
      }
      std::printf("sweep table: %s\n", sweep.csv_path.c_str());
      std::printf("sweep summary: %s\n", sweep.json_path.c_str());
      if (failures) {
        emit_failure("numerical", std::to_string(failures) + " sweep point(s) failed");
        return 3;
      }
      return 0;
    }

    const auto artifacts = ghxctl::run_scenario(config, out_dir);
    for (const auto& run : artifacts.runs) {
      std::printf("%-26s mae=[%.6g, %.6g] ce_l2=%.6g -> %s\n", run.name.c_str(),
                  run.metrics.mae[0], run.metrics.mae[1], run.metrics.ce_l2,
                  run.csv_path.c_str());
    }
    std::printf("summary: %s (%.3f CPU s over %zu steps)\n", artifacts.summary_path.c_str(),
                artifacts.cpu_seconds, artifacts.steps);
    return 0;
  } catch (const ghxctl::ConfigError& e) {
    emit_failure("config", e.what());
    return 2;
  } catch (const ghxctl::NumericError& e) {
    emit_failure("numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_failure("internal", e.what());
    return 3;
  }
}
