/*
 * Copyright 2026 The ShieldFL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "shieldfl/commands.h"
#include "shieldfl/config.h"
#include "shieldfl/errors.h"

int main(int argc, char** argv) {
  CLI::App app{"Selective-protection federated learning simulator"};
  app.require_subcommand(1);
  app.footer("Config keys (key = value):\n" + shieldfl::ConfigHelp());

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config file");
    cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", seed, "Override the config seed");
  };
  auto* run = app.add_subcommand("run", "Run the federated protocol");
  auto* sweep = app.add_subcommand("sweep", "Grid over sweep_tau x sweep_rho");
  auto* attack = app.add_subcommand("attack", "Run with the curious server");
  auto* fisher =
      app.add_subcommand("dump-fisher", "Write per-client Fisher scores");
  for (auto* cmd : {run, sweep, attack, fisher}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    shieldfl::ExperimentConfig config;
    if (!config_path.empty()) config = shieldfl::LoadConfig(config_path);
    if (seed) config.seed = *seed;
    if (run->parsed()) return shieldfl::CmdRun(config, out_dir, std::cerr);
    if (sweep->parsed()) return shieldfl::CmdSweep(config, out_dir, std::cerr);
    if (attack->parsed()) return shieldfl::CmdAttack(config, out_dir, std::cerr);
    return shieldfl::CmdDumpFisher(config, out_dir, std::cerr);
  } catch (const shieldfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
