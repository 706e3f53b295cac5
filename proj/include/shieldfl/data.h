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
#ifndef SHIELDFL_DATA_H_
#define SHIELDFL_DATA_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "shieldfl/types.h"

namespace shieldfl {

struct PartitionPlan {
  // assignments[k] lists the dataset rows owned by client k.
  std::vector<std::vector<std::size_t>> assignments;
  double concentration = 0.0;
};

// Gaussian blobs with unit-variance noise. Labels cycle 0,1,...,C-1 so every
// class gets floor(n/C) or ceil(n/C) rows. Class means sit at pairwise
// distance >= class_separation (exactly equal to it when C <= dim).
LabeledDataset SynthDataset(std::uint32_t num_classes, std::size_t dim,
                            std::size_t n, double class_separation, Rng& rng);

// Dirichlet label-skew split: for each class, p ~ Dir(alpha * 1) and the
// class rows (shuffled) are dealt by largest-remainder rounding. Clients left
// empty take one row from the currently largest client.
PartitionPlan DirichletPartition(const LabeledDataset& dataset,
                                 std::size_t n_clients, double alpha,
                                 Rng& rng);

// Independent Bernoulli(q) inclusion per client; an empty draw is redrawn.
std::vector<std::size_t> PoissonSelect(std::size_t n_clients, double q,
                                       Rng& rng);

// CSV with header `label,f0,...,f{d-1}`. num_classes is max(label) + 1
// unless `num_classes` is given (non-zero).
LabeledDataset ReadCsvDataset(std::istream& in, std::uint32_t num_classes = 0);
LabeledDataset LoadCsvDataset(const std::string& path,
                              std::uint32_t num_classes = 0);
void WriteCsvDataset(std::ostream& out, const LabeledDataset& dataset);

}  // namespace shieldfl

#endif  // SHIELDFL_DATA_H_
