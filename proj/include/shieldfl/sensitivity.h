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
#ifndef SHIELDFL_SENSITIVITY_H_
#define SHIELDFL_SENSITIVITY_H_

#include <cstddef>
#include <ostream>
#include <vector>

#include "shieldfl/mask.h"
#include "shieldfl/model.h"
#include "shieldfl/types.h"

namespace shieldfl {

enum class FisherMode {
  // (1/N) sum_i (d_j log p(y_i | x_i))^2, the usual diagonal empirical Fisher.
  kPerSampleAvg,
  // (d_j mean_i log p(y_i | x_i))^2, one squared dataset-level gradient.
  kWholeBatch,
};

struct FisherScores {
  std::vector<double> raw;         // >= 0
  std::vector<double> normalized;  // in [0, 1], per-layer min-max
  LayerLayout layout;
};

// Diagonal Fisher information of `params` on `data`. When max_samples is
// non-zero only the first max_samples rows are used.
std::vector<double> ComputeFisher(const Mlp& model,
                                  const LayeredParameters& params,
                                  const LabeledDataset& data, FisherMode mode,
                                  std::size_t max_samples = 0);

// Min-max within each layer. A constant layer maps to all zeros.
std::vector<double> NormalizePerLayer(const std::vector<double>& raw,
                                      const LayerLayout& layout);

// { j : normalized[j] > tau }.
SensitivityMask LocalMask(const std::vector<double>& normalized, double tau);

FisherScores ScoreParameters(const Mlp& model, const LayeredParameters& params,
                             const LabeledDataset& data, FisherMode mode,
                             std::size_t max_samples = 0);

// CSV `param_index,layer,raw,normalized`.
void WriteFisherCsv(std::ostream& out, const FisherScores& scores);

}  // namespace shieldfl

#endif  // SHIELDFL_SENSITIVITY_H_
