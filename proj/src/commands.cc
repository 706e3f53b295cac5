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
#include "shieldfl/commands.h"

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shieldfl/attack.h"
#include "shieldfl/protocol.h"
#include "shieldfl/report.h"

namespace fs = std::filesystem;

namespace shieldfl {
namespace {

std::ofstream OpenOut(const fs::path& path, bool binary = false) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void CloseOut(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void LogRound(std::ostream& log, const RoundReport& r) {
  log << "round " << r.round << " acc " << FormatNumber(r.accuracy)
      << " enc% " << FormatNumber(100.0 * r.ratios.enc) << " eps "
      << FormatNumber(r.privacy.eps) << "\n";
}

}  // namespace

int CmdRun(const ExperimentConfig& config, const fs::path& out_dir,
           std::ostream& log) {
  Simulation sim(config);

  std::vector<ClientAttackMetrics> attack_rows;
  AttackOptions options;
  options.idlg_steps = config.attack_idlg_steps;
  options.seed = config.seed;
  if (config.attack) {
    sim.set_observer([&](const RoundTrace& trace) {
      auto rows = AttackRound(sim, trace, options);
      attack_rows.insert(attack_rows.end(), rows.begin(), rows.end());
    });
  }
  if (config.dump_fisher) {
    sim.set_fisher_sink([&](std::size_t round, std::size_t client,
                            const FisherScores& scores) {
      const fs::path p = out_dir / "fisher" /
                         ("round_" + std::to_string(round) + "_client_" +
                          std::to_string(client) + ".csv");
      auto out = OpenOut(p);
      WriteFisherCsv(out, scores);
      CloseOut(out, p);
    });
  }
  std::ofstream messages;
  const fs::path messages_path = out_dir / "messages.bin";
  if (config.message_log) {
    messages = OpenOut(messages_path, true);
    sim.set_message_log(&messages);
  }

  std::vector<RoundReport> reports;
  while (sim.rounds_done() < config.rounds) {
    reports.push_back(sim.Step());
    LogRound(log, reports.back());
  }

  const fs::path rounds_path = out_dir / "rounds.csv";
  auto rounds = OpenOut(rounds_path);
  WriteRoundCsv(rounds, reports);
  CloseOut(rounds, rounds_path);
  const fs::path privacy_path = out_dir / "privacy.csv";
  auto privacy = OpenOut(privacy_path);
  WritePrivacyCsv(privacy, reports);
  CloseOut(privacy, privacy_path);
  if (config.attack) {
    const fs::path attack_path = out_dir / "attack.csv";
    auto attack = OpenOut(attack_path);
    WriteAttackCsv(attack, attack_rows);
    CloseOut(attack, attack_path);
  }
  if (config.message_log) CloseOut(messages, messages_path);
  return 0;
}

int CmdSweep(const ExperimentConfig& config, const fs::path& out_dir,
             std::ostream& log) {
  if (config.sweep_tau.empty() && config.sweep_rho.empty()) {
    return CmdRun(config, out_dir, log);
  }
  const std::vector<double> taus =
      config.sweep_tau.empty() ? std::vector<double>{config.tau}
                               : config.sweep_tau;
  const std::vector<double> rhos =
      config.sweep_rho.empty() ? std::vector<double>{config.rho}
                               : config.sweep_rho;
  const fs::path path = out_dir / "sweep.csv";
  auto out = OpenOut(path);
  out << kSweepCsvHeader << "\n";
  for (double tau : taus) {
    for (double rho : rhos) {
      ExperimentConfig cell = config;
      cell.tau = tau;
      cell.rho = rho;
      cell.attack = false;
      cell.dump_fisher = false;
      cell.message_log = false;
      const auto reports = RunExperiment(cell);
      if (reports.empty()) continue;
      out << RoundCsvRow(reports.back()) << "," << FormatNumber(tau) << ","
          << FormatNumber(rho) << "\n";
      log << "tau " << FormatNumber(tau) << " rho " << FormatNumber(rho)
          << " acc " << FormatNumber(reports.back().accuracy) << "\n";
    }
  }
  CloseOut(out, path);
  return 0;
}

int CmdAttack(const ExperimentConfig& config, const fs::path& out_dir,
              std::ostream& log) {
  ExperimentConfig c = config;
  c.attack = true;
  return CmdRun(c, out_dir, log);
}

int CmdDumpFisher(const ExperimentConfig& config, const fs::path& out_dir,
                  std::ostream& log) {
  const Simulation sim(config);
  const TrainOptions options = sim.train_options();
  for (const ClientState& original : sim.clients()) {
    ClientState client = original;
    const auto r = ClientUpdate(sim.model(), client, options);
    const fs::path p =
        out_dir / "fisher" / ("client_" + std::to_string(client.id) + ".csv");
    auto out = OpenOut(p);
    WriteFisherCsv(out, r.scores);
    CloseOut(out, p);
    log << "client " << client.id << " mask "
        << FormatNumber(100.0 * r.mask.Ratio()) << "%\n";
  }
  return 0;
}

}  // namespace shieldfl
