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
#include "shieldfl/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "shieldfl/errors.h"

namespace shieldfl {

void LabeledDataset::Validate() const {
  if (inputs.rows != labels.size()) {
    throw ShapeError("dataset has " + std::to_string(inputs.rows) +
                     " input rows but " + std::to_string(labels.size()) +
                     " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw ShapeError("label " + std::to_string(labels[i]) + " at row " +
                       std::to_string(i) + " exceeds num_classes " +
                       std::to_string(num_classes));
    }
  }
}

LabeledDataset LabeledDataset::Subset(
    std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.num_classes = num_classes;
  out.inputs = Matrix(indices.size(), inputs.cols);
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    auto src = inputs.row(indices[k]);
    std::copy(src.begin(), src.end(), out.inputs.row(k).begin());
    out.labels.push_back(labels[indices[k]]);
  }
  return out;
}

void LayerLayout::Append(std::string name, std::size_t length) {
  layers_.push_back({std::move(name), total_, length});
  total_ += length;
}

std::size_t LayerLayout::LayerOf(std::size_t param_index) const {
  if (param_index >= total_) {
    throw ShapeError("parameter index " + std::to_string(param_index) +
                     " outside layout of " + std::to_string(total_));
  }
  auto it = std::upper_bound(
      layers_.begin(), layers_.end(), param_index,
      [](std::size_t idx, const LayerSlice& s) { return idx < s.offset; });
  // Zero-length layers share an offset with their successor; step back to
  // the one that actually contains the index.
  auto l = static_cast<std::size_t>(it - layers_.begin()) - 1;
  while (layers_[l].length == 0) --l;
  return l;
}

namespace {

struct Offsets {
  std::size_t w1, b1, w2, b2, w3, b3;
};

Offsets OffsetsOf(const LayerLayout& layout) {
  const auto& l = layout.layers();
  return {l[0].offset, l[1].offset, l[2].offset,
          l[3].offset, l[4].offset, l[5].offset};
}

}  // namespace

Mlp::Mlp(ModelSpec spec) : spec_(spec) {
  if (spec.input_dim < 1 || spec.hidden1 < 1 || spec.hidden2 < 1) {
    throw ParameterError("model dimensions must all be >= 1");
  }
  if (spec.num_classes < 2) {
    throw ParameterError("num_classes must be >= 2, got " +
                         std::to_string(spec.num_classes));
  }
  layout_.Append("fc1.weight", spec.hidden1 * spec.input_dim);
  layout_.Append("fc1.bias", spec.hidden1);
  layout_.Append("fc2.weight", spec.hidden2 * spec.hidden1);
  layout_.Append("fc2.bias", spec.hidden2);
  layout_.Append("fc3.weight", spec.num_classes * spec.hidden2);
  layout_.Append("fc3.bias", spec.num_classes);
}

LayeredParameters Mlp::Zeros() const {
  return {std::vector<double>(layout_.total_params(), 0.0), layout_};
}

LayeredParameters Mlp::Init(Rng& rng) const {
  LayeredParameters p = Zeros();
  const std::size_t fan_in[] = {spec_.input_dim, spec_.input_dim,
                                spec_.hidden1,   spec_.hidden1,
                                spec_.hidden2,   spec_.hidden2};
  for (std::size_t l = 0; l < 6; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : p.layer(l)) v = dist(rng);
  }
  return p;
}

void Mlp::CheckParams(const LayeredParameters& params) const {
  if (params.values.size() != layout_.total_params() ||
      !(params.layout == layout_)) {
    throw ShapeError("parameter vector of size " +
                     std::to_string(params.values.size()) +
                     " does not match model with " +
                     std::to_string(layout_.total_params()) + " parameters");
  }
}

void Mlp::CheckData(const LabeledDataset& data) const {
  if (data.inputs.cols != spec_.input_dim) {
    throw ShapeError("input dim " + std::to_string(data.inputs.cols) +
                     " != model input dim " +
                     std::to_string(spec_.input_dim));
  }
  if (data.num_classes != 0 && data.num_classes > spec_.num_classes) {
    throw ShapeError("dataset declares more classes than the model");
  }
  if (data.inputs.rows != data.labels.size()) {
    throw ShapeError("input rows and labels disagree");
  }
  for (auto y : data.labels) {
    if (y >= spec_.num_classes) {
      throw ShapeError("label " + std::to_string(y) + " out of range");
    }
  }
}

void Mlp::Logits(const std::vector<double>& theta, std::span<const double> x,
                 std::span<double> out) const {
  const auto o = OffsetsOf(layout_);
  const std::size_t in = spec_.input_dim, h1 = spec_.hidden1,
                    h2 = spec_.hidden2, c = spec_.num_classes;
  std::vector<double> z1(h1), z2(h2);
  for (std::size_t i = 0; i < h1; ++i) {
    const double* w = theta.data() + o.w1 + i * in;
    double a = theta[o.b1 + i];
    for (std::size_t j = 0; j < in; ++j) a += w[j] * x[j];
    z1[i] = a > 0.0 ? a : 0.0;
  }
  for (std::size_t i = 0; i < h2; ++i) {
    const double* w = theta.data() + o.w2 + i * h1;
    double a = theta[o.b2 + i];
    for (std::size_t j = 0; j < h1; ++j) a += w[j] * z1[j];
    z2[i] = a > 0.0 ? a : 0.0;
  }
  for (std::size_t i = 0; i < c; ++i) {
    const double* w = theta.data() + o.w3 + i * h2;
    double a = theta[o.b3 + i];
    for (std::size_t j = 0; j < h2; ++j) a += w[j] * z2[j];
    out[i] = a;
  }
}

namespace {

// log-sum-exp and softmax of `logits`, numerically stable.
double LogSumExp(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double v : logits) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

ForwardResult Mlp::Forward(const LayeredParameters& params,
                           const LabeledBatch& batch) const {
  CheckParams(params);
  CheckData(batch);
  if (batch.empty()) throw ShapeError("empty batch");
  ForwardResult r;
  r.logits = Matrix(batch.size(), spec_.num_classes);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto out = r.logits.row(i);
    Logits(params.values, batch.inputs.row(i), out);
    total += LogSumExp(out) - out[batch.labels[i]];
  }
  r.mean_loss = total / static_cast<double>(batch.size());
  return r;
}

double Mlp::AccumulateExample(const std::vector<double>& theta,
                              std::span<const double> x, std::uint32_t label,
                              double scale, std::vector<double>& grad) const {
  const auto o = OffsetsOf(layout_);
  const std::size_t in = spec_.input_dim, h1 = spec_.hidden1,
                    h2 = spec_.hidden2, c = spec_.num_classes;
  std::vector<double> a1(h1), z1(h1), a2(h2), z2(h2), out(c);
  for (std::size_t i = 0; i < h1; ++i) {
    const double* w = theta.data() + o.w1 + i * in;
    double a = theta[o.b1 + i];
    for (std::size_t j = 0; j < in; ++j) a += w[j] * x[j];
    a1[i] = a;
    z1[i] = a > 0.0 ? a : 0.0;
  }
  for (std::size_t i = 0; i < h2; ++i) {
    const double* w = theta.data() + o.w2 + i * h1;
    double a = theta[o.b2 + i];
    for (std::size_t j = 0; j < h1; ++j) a += w[j] * z1[j];
    a2[i] = a;
    z2[i] = a > 0.0 ? a : 0.0;
  }
  for (std::size_t i = 0; i < c; ++i) {
    const double* w = theta.data() + o.w3 + i * h2;
    double a = theta[o.b3 + i];
    for (std::size_t j = 0; j < h2; ++j) a += w[j] * z2[j];
    out[i] = a;
  }
  const double lse = LogSumExp(out);
  const double loss = lse - out[label];

  // Output delta: softmax - one_hot, scaled.
  std::vector<double> d3(c);
  for (std::size_t i = 0; i < c; ++i) {
    d3[i] = (std::exp(out[i] - lse) - (i == label ? 1.0 : 0.0)) * scale;
  }
  std::vector<double> dz2(h2, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    double* g = grad.data() + o.w3 + i * h2;
    const double* w = theta.data() + o.w3 + i * h2;
    const double d = d3[i];
    for (std::size_t j = 0; j < h2; ++j) {
      g[j] += d * z2[j];
      dz2[j] += w[j] * d;
    }
    grad[o.b3 + i] += d;
  }
  std::vector<double> dz1(h1, 0.0);
  for (std::size_t i = 0; i < h2; ++i) {
    // ReLU subgradient at 0 is 0.
    const double d = a2[i] > 0.0 ? dz2[i] : 0.0;
    if (d == 0.0) continue;
    double* g = grad.data() + o.w2 + i * h1;
    const double* w = theta.data() + o.w2 + i * h1;
    for (std::size_t j = 0; j < h1; ++j) {
      g[j] += d * z1[j];
      dz1[j] += w[j] * d;
    }
    grad[o.b2 + i] += d;
  }
  for (std::size_t i = 0; i < h1; ++i) {
    const double d = a1[i] > 0.0 ? dz1[i] : 0.0;
    if (d == 0.0) continue;
    double* g = grad.data() + o.w1 + i * in;
    for (std::size_t j = 0; j < in; ++j) g[j] += d * x[j];
    grad[o.b1 + i] += d;
  }
  return loss;
}

BackwardResult Mlp::Backward(const LayeredParameters& params,
                             const LabeledDataset& data,
                             std::span<const std::size_t> rows) const {
  CheckParams(params);
  CheckData(data);
  if (rows.empty()) throw ShapeError("empty batch");
  BackwardResult r{Zeros(), 0.0};
  const double scale = 1.0 / static_cast<double>(rows.size());
  double total = 0.0;
  for (std::size_t row : rows) {
    if (row >= data.size()) throw ShapeError("batch row out of range");
    total += AccumulateExample(params.values, data.inputs.row(row),
                               data.labels[row], scale, r.gradient.values);
  }
  r.mean_loss = total * scale;
  return r;
}

BackwardResult Mlp::Backward(const LayeredParameters& params,
                             const LabeledBatch& batch) const {
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return Backward(params, batch, rows);
}

BackwardResult Mlp::SampleGradient(const LayeredParameters& params,
                                   std::span<const double> input,
                                   std::uint32_t label) const {
  CheckParams(params);
  if (input.size() != spec_.input_dim) throw ShapeError("input dim mismatch");
  if (label >= spec_.num_classes) throw ShapeError("label out of range");
  BackwardResult r{Zeros(), 0.0};
  r.mean_loss =
      AccumulateExample(params.values, input, label, 1.0, r.gradient.values);
  return r;
}

TrainResult Mlp::LocalTrain(const LayeredParameters& params,
                            const LabeledDataset& data, std::size_t epochs,
                            double lr, std::size_t batch_size,
                            Rng& rng) const {
  CheckParams(params);
  CheckData(data);
  if (data.empty()) throw ProtocolError("local_train on an empty dataset");
  if (batch_size == 0) throw ParameterError("batch_size must be >= 1");
  TrainResult r{params, Zeros()};
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> batch;
  for (std::size_t e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      batch.assign(order.begin() + start, order.begin() + end);
      std::sort(batch.begin(), batch.end());
      const auto g = Backward(r.params, data, batch);
      for (std::size_t j = 0; j < r.params.values.size(); ++j) {
        r.params.values[j] -= lr * g.gradient.values[j];
      }
    }
  }
  for (std::size_t j = 0; j < r.params.values.size(); ++j) {
    r.delta.values[j] = r.params.values[j] - params.values[j];
  }
  return r;
}

double Mlp::Evaluate(const LayeredParameters& params,
                     const LabeledDataset& data) const {
  CheckParams(params);
  CheckData(data);
  if (data.empty()) throw ProtocolError("evaluate on an empty dataset");
  std::vector<double> out(spec_.num_classes);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Logits(params.values, data.inputs.row(i), out);
    // max_element returns the first maximum: ties go to the lowest class.
    const auto pred = static_cast<std::uint32_t>(
        std::max_element(out.begin(), out.end()) - out.begin());
    if (pred == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::vector<double> Mlp::Probabilities(const LayeredParameters& params,
                                       std::span<const double> input) const {
  CheckParams(params);
  if (input.size() != spec_.input_dim) throw ShapeError("input dim mismatch");
  std::vector<double> out(spec_.num_classes);
  Logits(params.values, input, out);
  const double lse = LogSumExp(out);
  for (double& v : out) v = std::exp(v - lse);
  return out;
}

}  // namespace shieldfl
