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
#ifndef SHIELDFL_TYPES_H_
#define SHIELDFL_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace shieldfl {

// Every stochastic routine takes its generator explicitly.
using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a tag.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Inputs with integer class labels. A batch is just a small dataset.
struct LabeledDataset {
  Matrix inputs;
  std::vector<std::uint32_t> labels;
  std::uint32_t num_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return inputs.cols; }
  bool empty() const { return labels.empty(); }

  // Throws ShapeError if rows/labels disagree or a label is out of range.
  void Validate() const;
  // Copies the given rows, preserving order.
  LabeledDataset Subset(std::span<const std::size_t> indices) const;
};

using LabeledBatch = LabeledDataset;

}  // namespace shieldfl

#endif  // SHIELDFL_TYPES_H_
