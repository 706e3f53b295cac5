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
#ifndef SHIELDFL_MODEL_H_
#define SHIELDFL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shieldfl/types.h"

namespace shieldfl {

struct LayerSlice {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const LayerSlice&) const = default;
};

// Contiguous, non-overlapping layer ranges over a flat parameter vector.
class LayerLayout {
 public:
  LayerLayout() = default;
  // Offsets are assigned in order.
  void Append(std::string name, std::size_t length);

  const std::vector<LayerSlice>& layers() const { return layers_; }
  std::size_t total_params() const { return total_; }
  // Index of the layer owning parameter `param_index`.
  std::size_t LayerOf(std::size_t param_index) const;

  bool operator==(const LayerLayout&) const = default;

 private:
  std::vector<LayerSlice> layers_;
  std::size_t total_ = 0;
};

// Flat parameter (or gradient, or delta) vector plus its layer map.
struct LayeredParameters {
  std::vector<double> values;
  LayerLayout layout;

  std::span<double> layer(std::size_t l) {
    const auto& s = layout.layers()[l];
    return {values.data() + s.offset, s.length};
  }
  std::span<const double> layer(std::size_t l) const {
    const auto& s = layout.layers()[l];
    return {values.data() + s.offset, s.length};
  }
  std::size_t size() const { return values.size(); }
};

using GradientVector = LayeredParameters;

struct ModelSpec {
  std::size_t input_dim = 0;
  std::size_t hidden1 = 256;
  std::size_t hidden2 = 128;
  std::size_t num_classes = 0;
};

struct ForwardResult {
  Matrix logits;
  double mean_loss = 0.0;
};

struct BackwardResult {
  GradientVector gradient;
  double mean_loss = 0.0;
};

struct TrainResult {
  LayeredParameters params;
  LayeredParameters delta;  // params - old, exactly.
};

// Linear(in, h1) -> ReLU -> Linear(h1, h2) -> ReLU -> Linear(h2, classes),
// trained with mean softmax cross-entropy. Parameters are laid out as
// fc1.weight (row-major, out x in), fc1.bias, fc2.weight, fc2.bias,
// fc3.weight, fc3.bias.
class Mlp {
 public:
  // Throws ParameterError unless every dim >= 1 and num_classes >= 2.
  explicit Mlp(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const LayerLayout& layout() const { return layout_; }
  std::size_t num_params() const { return layout_.total_params(); }

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  LayeredParameters Init(Rng& rng) const;
  LayeredParameters Zeros() const;

  ForwardResult Forward(const LayeredParameters& params,
                        const LabeledBatch& batch) const;

  // d(mean loss)/d(theta) over the whole batch.
  BackwardResult Backward(const LayeredParameters& params,
                          const LabeledBatch& batch) const;
  // Same, restricted to `rows` of `data` (summed in the given order).
  BackwardResult Backward(const LayeredParameters& params,
                          const LabeledDataset& data,
                          std::span<const std::size_t> rows) const;
  // Gradient of the loss of a single example given as a raw input row.
  BackwardResult SampleGradient(const LayeredParameters& params,
                                std::span<const double> input,
                                std::uint32_t label) const;

  // Plain SGD. Each epoch reshuffles with `rng`; the final partial batch is
  // kept. Rows inside a batch are summed in ascending index order.
  TrainResult LocalTrain(const LayeredParameters& params,
                         const LabeledDataset& data, std::size_t epochs,
                         double lr, std::size_t batch_size, Rng& rng) const;

  // Fraction of rows whose argmax logit (lowest index on ties) is the label.
  double Evaluate(const LayeredParameters& params,
                  const LabeledDataset& data) const;

  // Softmax of a single input row.
  std::vector<double> Probabilities(const LayeredParameters& params,
                                    std::span<const double> input) const;

 private:
  void CheckParams(const LayeredParameters& params) const;
  void CheckData(const LabeledDataset& data) const;
  // Accumulates the gradient of one example's loss (scaled by `scale`) into
  // `grad`; returns the example's loss.
  double AccumulateExample(const std::vector<double>& theta,
                           std::span<const double> x, std::uint32_t label,
                           double scale, std::vector<double>& grad) const;
  void Logits(const std::vector<double>& theta, std::span<const double> x,
              std::span<double> out) const;

  ModelSpec spec_;
  LayerLayout layout_;
};

}  // namespace shieldfl

#endif  // SHIELDFL_MODEL_H_
