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
#ifndef SHIELDFL_ATTACK_H_
#define SHIELDFL_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "shieldfl/mask.h"
#include "shieldfl/model.h"
#include "shieldfl/protocol.h"
#include "shieldfl/types.h"

namespace shieldfl {

// What the aggregation server can read from one upload: the plaintext
// coordinates and the round-start global model.
struct AttackerView {
  std::vector<std::uint32_t> visible_indices;
  std::vector<double> visible_values;
  SensitivityMask hidden;  // everything not sent in the clear
  LayerLayout layout;
  LayeredParameters model;
};

AttackerView MakeAttackerView(const ClientUpload& upload,
                              const LayeredParameters& round_start);

struct LabelRestoration {
  std::vector<bool> existence;
  std::vector<std::uint32_t> counts;
};

struct RestoreOptions {
  std::size_t probe_count = 64;
  // Multiplies visible values to turn them into a mean-loss gradient. An
  // SGD step uploads -lr * g, so -1 / lr recovers g.
  double gradient_scale = 1.0;
};

// Label recovery from the output-layer bias gradient
// g_c = mean_i(p_ic - [y_i = c]). With p_hat the mean softmax of the model
// over N(0, I) probe inputs, class c is flagged when g_c - p_hat_c < -1/(2B)
// and its count is round(B * (p_hat_c - g_c)). Hidden coordinates read as
// absent.
LabelRestoration RestoreLabels(const Mlp& model, const AttackerView& view,
                               std::size_t batch_size, Rng& rng,
                               const RestoreOptions& options = {});

LabelRestoration TrueLabels(std::span<const std::uint32_t> labels,
                            std::uint32_t num_classes);

// Per-class agreement of existence flags / exact counts.
double LeAcc(const LabelRestoration& pred, const LabelRestoration& truth);
double LnAcc(const LabelRestoration& pred, const LabelRestoration& truth);

struct IdlgOptions {
  std::size_t steps = 2000;
  double initial_step = 0.1;
  double fd_step = 1e-5;
  std::size_t max_halvings = 40;
};

struct IdlgResult {
  std::vector<double> x;
  double objective = 0.0;
  double initial_objective = 0.0;
  std::vector<double> history;  // objective after each accepted step
  std::size_t steps_taken = 0;
};

// sum over visible j of (grad_j(x) - target_j)^2 for one labeled example.
double IdlgObjective(const Mlp& model, const LayeredParameters& params,
                     std::span<const double> x, std::uint32_t label,
                     std::span<const double> target,
                     const SensitivityMask& visible);

// Gradient descent on the input with central-difference gradients and a
// step-halving line search, so the objective never increases. Throws
// ProtocolError if the objective becomes non-finite.
IdlgResult IdlgReconstruct(const Mlp& model, const LayeredParameters& params,
                           std::span<const double> target,
                           const SensitivityMask& visible, std::uint32_t label,
                           std::vector<double> x0,
                           const IdlgOptions& options = {});

double MeanSquaredError(std::span<const double> a, std::span<const double> b);

struct ClientAttackMetrics {
  std::size_t round = 0;
  std::size_t client = 0;
  double le_acc = 0.0;
  double ln_acc = 0.0;
  double idlg_mse = 0.0;  // NaN when the reconstruction is disabled
  double visible_fraction = 0.0;
};

struct AttackOptions {
  std::size_t probe_count = 64;
  std::size_t idlg_steps = 0;
  std::uint64_t seed = 0;
};

// Runs the attacks against every upload of a round, using only what the
// aggregation server stored plus the broadcast model. Ground truth comes
// from the simulation's client data.
std::vector<ClientAttackMetrics> AttackRound(const Simulation& sim,
                                             const RoundTrace& trace,
                                             const AttackOptions& options);

}  // namespace shieldfl

#endif  // SHIELDFL_ATTACK_H_
