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
#include "shieldfl/attack.h"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "shieldfl/errors.h"

namespace shieldfl {

AttackerView MakeAttackerView(const ClientUpload& upload,
                              const LayeredParameters& round_start) {
  AttackerView view;
  view.visible_indices = upload.plaintext.indices;
  view.visible_values = upload.plaintext.values;
  view.layout = round_start.layout;
  view.model = round_start;
  view.hidden = SensitivityMask(round_start.size(), view.visible_indices)
                    .Complement();
  return view;
}

LabelRestoration RestoreLabels(const Mlp& model, const AttackerView& view,
                               std::size_t batch_size, Rng& rng,
                               const RestoreOptions& options) {
  if (batch_size == 0) throw ParameterError("batch size must be positive");
  const std::size_t classes = model.spec().num_classes;
  LabelRestoration out;
  out.existence.assign(classes, false);
  out.counts.assign(classes, 0);

  const LayerSlice& bias = view.layout.layers().back();
  std::vector<double> g(classes, 0.0);
  std::vector<bool> seen(classes, false);
  bool any = false;
  for (std::size_t i = 0; i < view.visible_indices.size(); ++i) {
    const std::size_t j = view.visible_indices[i];
    if (j < bias.offset || j >= bias.offset + bias.length) continue;
    g[j - bias.offset] = view.visible_values[i] * options.gradient_scale;
    seen[j - bias.offset] = true;
    any = true;
  }
  if (!any) return out;

  std::vector<double> p_hat(classes, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> probe(model.spec().input_dim);
  const std::size_t n_probe = std::max<std::size_t>(options.probe_count, 1);
  for (std::size_t s = 0; s < n_probe; ++s) {
    for (double& v : probe) v = normal(rng);
    const auto p = model.Probabilities(view.model, probe);
    for (std::size_t c = 0; c < classes; ++c) p_hat[c] += p[c];
  }
  for (double& v : p_hat) v /= static_cast<double>(n_probe);

  const double b = static_cast<double>(batch_size);
  for (std::size_t c = 0; c < classes; ++c) {
    if (!seen[c]) continue;
    const double signal = g[c] - p_hat[c];
    if (signal < -0.5 / b) {
      out.existence[c] = true;
      out.counts[c] = static_cast<std::uint32_t>(
          std::max(1.0, std::round(-b * signal)));
    }
  }
  return out;
}

LabelRestoration TrueLabels(std::span<const std::uint32_t> labels,
                            std::uint32_t num_classes) {
  LabelRestoration out;
  out.existence.assign(num_classes, false);
  out.counts.assign(num_classes, 0);
  for (std::uint32_t y : labels) {
    if (y >= num_classes) throw ShapeError("label out of range");
    out.existence[y] = true;
    ++out.counts[y];
  }
  return out;
}

namespace {

void CheckSameClasses(const LabelRestoration& a, const LabelRestoration& b) {
  if (a.existence.size() != b.existence.size() ||
      a.counts.size() != b.counts.size() || a.counts.empty()) {
    throw ShapeError("label restorations cover different class counts");
  }
}

}  // namespace

double LeAcc(const LabelRestoration& pred, const LabelRestoration& truth) {
  CheckSameClasses(pred, truth);
  std::size_t hit = 0;
  for (std::size_t c = 0; c < pred.existence.size(); ++c) {
    hit += pred.existence[c] == truth.existence[c];
  }
  return static_cast<double>(hit) / static_cast<double>(pred.existence.size());
}

double LnAcc(const LabelRestoration& pred, const LabelRestoration& truth) {
  CheckSameClasses(pred, truth);
  std::size_t hit = 0;
  for (std::size_t c = 0; c < pred.counts.size(); ++c) {
    hit += pred.counts[c] == truth.counts[c];
  }
  return static_cast<double>(hit) / static_cast<double>(pred.counts.size());
}

double IdlgObjective(const Mlp& model, const LayeredParameters& params,
                     std::span<const double> x, std::uint32_t label,
                     std::span<const double> target,
                     const SensitivityMask& visible) {
  if (target.size() != params.size() || visible.universe() != params.size()) {
    throw ShapeError("target gradient does not match the model");
  }
  const auto g = model.SampleGradient(params, x, label).gradient.values;
  double f = 0.0;
  for (std::uint32_t j : visible.indices()) {
    const double d = g[j] - target[j];
    f += d * d;
  }
  return f;
}

IdlgResult IdlgReconstruct(const Mlp& model, const LayeredParameters& params,
                           std::span<const double> target,
                           const SensitivityMask& visible, std::uint32_t label,
                           std::vector<double> x0, const IdlgOptions& options) {
  if (x0.size() != model.spec().input_dim) {
    throw ShapeError("initial guess has the wrong input dimension");
  }
  auto objective = [&](const std::vector<double>& x) {
    const double f = IdlgObjective(model, params, x, label, target, visible);
    if (!std::isfinite(f)) {
      throw ProtocolError("gradient-inversion objective became non-finite");
    }
    return f;
  };

  IdlgResult r;
  r.x = std::move(x0);
  r.objective = objective(r.x);
  r.initial_objective = r.objective;
  double step = options.initial_step;
  std::vector<double> grad(r.x.size());
  std::vector<double> trial(r.x.size());
  for (std::size_t it = 0; it < options.steps && r.objective > 0.0; ++it) {
    std::vector<double> probe = r.x;
    for (std::size_t d = 0; d < r.x.size(); ++d) {
      const double h = options.fd_step * std::max(1.0, std::abs(r.x[d]));
      probe[d] = r.x[d] + h;
      const double up = objective(probe);
      probe[d] = r.x[d] - h;
      const double down = objective(probe);
      probe[d] = r.x[d];
      grad[d] = (up - down) / (2.0 * h);
    }
    bool accepted = false;
    for (std::size_t h = 0; h <= options.max_halvings; ++h) {
      for (std::size_t d = 0; d < r.x.size(); ++d) {
        trial[d] = r.x[d] - step * grad[d];
      }
      const double f = objective(trial);
      if (f < r.objective) {
        r.x = trial;
        r.objective = f;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    r.history.push_back(r.objective);
    ++r.steps_taken;
    step *= 2.0;
  }
  return r;
}

double MeanSquaredError(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw ShapeError("mean squared error needs equal, non-empty vectors");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

std::vector<ClientAttackMetrics> AttackRound(const Simulation& sim,
                                             const RoundTrace& trace,
                                             const AttackOptions& options) {
  const ExperimentConfig& config = sim.config();
  std::vector<ClientAttackMetrics> out;
  for (const ClientUpload& upload : trace.uploads) {
    const ClientState& client = sim.clients().at(upload.client_id);
    const std::size_t n = client.data.size();
    const std::size_t batches = (n + config.batch_size - 1) / config.batch_size;
    const double steps = static_cast<double>(config.local_epochs * batches);

    ClientAttackMetrics m;
    m.round = trace.round;
    m.client = upload.client_id;
    const AttackerView view = MakeAttackerView(upload, trace.global_before);
    m.visible_fraction = static_cast<double>(view.visible_indices.size()) /
                         static_cast<double>(trace.global_before.size());

    Rng rng(DeriveSeed(options.seed, 0x4000 + trace.round * 4096 + m.client));
    RestoreOptions ro;
    ro.probe_count = options.probe_count;
    ro.gradient_scale = -1.0 / (config.lr * steps);
    const auto pred = RestoreLabels(sim.model(), view, n, rng, ro);
    const auto truth = TrueLabels(client.data.labels, client.data.num_classes);
    m.le_acc = LeAcc(pred, truth);
    m.ln_acc = LnAcc(pred, truth);

    m.idlg_mse = std::numeric_limits<double>::quiet_NaN();
    if (options.idlg_steps > 0) {
      const auto x_true = client.data.inputs.row(0);
      const std::uint32_t y = client.data.labels[0];
      const auto target =
          sim.model().SampleGradient(trace.global_before, x_true, y);
      const SensitivityMask visible = view.hidden.Complement();
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> x0(x_true.size());
      for (double& v : x0) v = normal(rng);
      IdlgOptions io;
      io.steps = options.idlg_steps;
      const auto rec = IdlgReconstruct(sim.model(), trace.global_before,
                                       target.gradient.values, visible, y,
                                       std::move(x0), io);
      m.idlg_mse = MeanSquaredError(rec.x, x_true);
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace shieldfl
