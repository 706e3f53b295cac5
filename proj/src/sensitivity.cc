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
#include "shieldfl/sensitivity.h"

#include <algorithm>
#include <cstdio>
#include <string>

#include "shieldfl/errors.h"

namespace shieldfl {

std::vector<double> ComputeFisher(const Mlp& model,
                                  const LayeredParameters& params,
                                  const LabeledDataset& data, FisherMode mode,
                                  std::size_t max_samples) {
  if (data.empty()) throw ProtocolError("Fisher scores need a non-empty dataset");
  const std::size_t n =
      max_samples == 0 ? data.size() : std::min(max_samples, data.size());
  std::vector<double> fisher(model.num_params(), 0.0);
  if (mode == FisherMode::kWholeBatch) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    const auto g = model.Backward(params, data, rows);
    // The log-likelihood gradient is the negated cross-entropy gradient;
    // squaring drops the sign.
    for (std::size_t j = 0; j < fisher.size(); ++j) {
      fisher[j] = g.gradient.values[j] * g.gradient.values[j];
    }
    return fisher;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = model.SampleGradient(params, data.inputs.row(i),
                                        data.labels[i]);
    for (std::size_t j = 0; j < fisher.size(); ++j) {
      fisher[j] += g.gradient.values[j] * g.gradient.values[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : fisher) v *= inv;
  return fisher;
}

std::vector<double> NormalizePerLayer(const std::vector<double>& raw,
                                      const LayerLayout& layout) {
  if (raw.size() != layout.total_params()) {
    throw ShapeError("score vector does not match layer layout");
  }
  std::vector<double> out(raw.size(), 0.0);
  for (const auto& layer : layout.layers()) {
    if (layer.length == 0) continue;
    const auto first = raw.begin() + static_cast<std::ptrdiff_t>(layer.offset);
    const auto last = first + static_cast<std::ptrdiff_t>(layer.length);
    const auto [lo_it, hi_it] = std::minmax_element(first, last);
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) continue;
    const double span = hi - lo;
    for (std::size_t j = layer.offset; j < layer.offset + layer.length; ++j) {
      out[j] = std::clamp((raw[j] - lo) / span, 0.0, 1.0);
    }
  }
  return out;
}

SensitivityMask LocalMask(const std::vector<double>& normalized, double tau) {
  std::vector<std::uint32_t> idx;
  for (std::size_t j = 0; j < normalized.size(); ++j) {
    if (normalized[j] > tau) idx.push_back(static_cast<std::uint32_t>(j));
  }
  return SensitivityMask(normalized.size(), std::move(idx));
}

FisherScores ScoreParameters(const Mlp& model, const LayeredParameters& params,
                             const LabeledDataset& data, FisherMode mode,
                             std::size_t max_samples) {
  FisherScores s;
  s.raw = ComputeFisher(model, params, data, mode, max_samples);
  s.normalized = NormalizePerLayer(s.raw, model.layout());
  s.layout = model.layout();
  return s;
}

void WriteFisherCsv(std::ostream& out, const FisherScores& scores) {
  out << "param_index,layer,raw,normalized\n";
  char buf[128];
  for (std::size_t l = 0; l < scores.layout.layers().size(); ++l) {
    const auto& layer = scores.layout.layers()[l];
    for (std::size_t j = layer.offset; j < layer.offset + layer.length; ++j) {
      std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g,%.17g\n", j,
                    layer.name.c_str(), scores.raw[j], scores.normalized[j]);
      out << buf;
    }
  }
}

}  // namespace shieldfl
