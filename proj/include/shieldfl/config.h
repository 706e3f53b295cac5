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
#ifndef SHIELDFL_CONFIG_H_
#define SHIELDFL_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shieldfl/privacy.h"
#include "shieldfl/sensitivity.h"

namespace shieldfl {

enum class DatasetSource { kSynth, kCsv };

// How the key server scales the averaged update.
enum class ServerLrMode {
  kFedAvgEquiv,   // eta_g = 1: theta += mean of client deltas
  kParticipants,  // eta_g = |K^t|: theta += sum of client deltas
  kExplicit,      // eta_g = server_lr
};

// Divisor applied to each coordinate of the aggregated update.
enum class AggregationDivisor {
  kParticipants,  // |K^t| for every coordinate
  kContributors,  // number of clients that actually uploaded the coordinate
};

struct ExperimentConfig {
  std::uint64_t seed = 1;

  DatasetSource dataset = DatasetSource::kSynth;
  std::string dataset_path;  // CSV training data
  std::string test_path;     // CSV held-out data; empty -> split off
  double test_fraction = 0.2;
  std::uint32_t synth_classes = 10;
  std::size_t synth_dim = 20;
  std::size_t synth_train = 2000;
  std::size_t synth_test = 1000;
  double synth_separation = 8.0;

  std::size_t hidden1 = 256;
  std::size_t hidden2 = 128;

  std::size_t n_clients = 20;
  std::size_t rounds = 10;
  std::size_t local_epochs = 5;
  std::size_t batch_size = 32;
  double lr = 0.01;
  double dirichlet_alpha = 0.5;
  double q = 1.0;

  double tau = 0.05;
  double rho = 0.5;
  FisherMode fisher_mode = FisherMode::kPerSampleAvg;
  std::size_t fisher_max_samples = 0;

  double clip = 0.05;
  double sigma = 1.0;
  double delta = 1e-5;
  NoiseScaling noise_scaling = NoiseScaling::kStandard;
  std::vector<double> alpha_grid = DefaultAlphaGrid();

  ServerLrMode server_lr_mode = ServerLrMode::kFedAvgEquiv;
  double server_lr = 1.0;
  AggregationDivisor divisor = AggregationDivisor::kParticipants;

  std::size_t modulus_bits = 2048;
  unsigned frac_bits = 30;
  unsigned int_bits = 16;
  unsigned guard_bits = 8;

  bool attack = false;
  bool attack_ablation = true;  // attack mode: sigma = 0 and no clipping
  std::size_t attack_idlg_steps = 0;

  bool dump_fisher = false;
  bool message_log = false;

  std::vector<double> sweep_tau;
  std::vector<double> sweep_rho;

  // Throws ConfigError naming the first offending key.
  void Validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// Line-oriented `key = value`; `#` starts a comment. Unknown keys, malformed
// values and out-of-range values raise ConfigError naming the key.
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);
// Every key, one per line, in a form ParseConfig reads back to an equal
// config.
std::string SerializeConfig(const ExperimentConfig& config);
// `key  default  description` lines for --help.
std::string ConfigHelp();

}  // namespace shieldfl

#endif  // SHIELDFL_CONFIG_H_
