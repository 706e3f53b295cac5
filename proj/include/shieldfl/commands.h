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
#ifndef SHIELDFL_COMMANDS_H_
#define SHIELDFL_COMMANDS_H_

#include <filesystem>
#include <iosfwd>

#include "shieldfl/config.h"

namespace shieldfl {

// Each command writes its CSVs under `out_dir` (created if missing), logs
// progress to `log`, and returns a process exit code. Errors propagate as
// exceptions.

// rounds.csv and privacy.csv; attack.csv when config.attack; fisher/ when
// config.dump_fisher; messages.bin when config.message_log.
int CmdRun(const ExperimentConfig& config, const std::filesystem::path& out_dir,
           std::ostream& log);

// sweep.csv with one final-round row per (tau, rho) cell. An empty grid
// falls back to CmdRun.
int CmdSweep(const ExperimentConfig& config,
             const std::filesystem::path& out_dir, std::ostream& log);

// CmdRun with the attacker enabled.
int CmdAttack(const ExperimentConfig& config,
              const std::filesystem::path& out_dir, std::ostream& log);

// One local update per client from the initial model; writes
// fisher/client_<k>.csv.
int CmdDumpFisher(const ExperimentConfig& config,
                  const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace shieldfl

#endif  // SHIELDFL_COMMANDS_H_
