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
#include "shieldfl/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "shieldfl/errors.h"

namespace shieldfl {

namespace {

double MinPairwiseDistance(const Matrix& means) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < means.rows; ++a) {
    for (std::size_t b = a + 1; b < means.rows; ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < means.cols; ++j) {
        const double d = means.at(a, j) - means.at(b, j);
        d2 += d * d;
      }
      best = std::min(best, std::sqrt(d2));
    }
  }
  return best;
}

}  // namespace

LabeledDataset SynthDataset(std::uint32_t num_classes, std::size_t dim,
                            std::size_t n, double class_separation, Rng& rng) {
  if (num_classes < 1 || dim < 1) {
    throw ParameterError("synth_dataset needs num_classes >= 1 and dim >= 1");
  }
  if (n < num_classes) {
    throw ParameterError("synth_dataset needs n >= num_classes");
  }
  if (class_separation < 0.0) {
    throw ParameterError("class_separation must be >= 0");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix means(num_classes, dim);
  if (class_separation > 0.0) {
    if (num_classes <= dim) {
      // Scaled one-hot corners: every pair is exactly `separation` apart.
      const double s = class_separation / std::sqrt(2.0);
      for (std::uint32_t c = 0; c < num_classes; ++c) means.at(c, c) = s;
    } else {
      for (double& v : means.data) v = gauss(rng);
      const double d = MinPairwiseDistance(means);
      // Coincident random means are a measure-zero event; rescale otherwise.
      const double k = d > 0.0 ? class_separation / d : class_separation;
      for (double& v : means.data) v *= k;
    }
  }
  LabeledDataset out;
  out.num_classes = num_classes;
  out.inputs = Matrix(n, dim);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::uint32_t>(i % num_classes);
    out.labels[i] = c;
    for (std::size_t j = 0; j < dim; ++j) {
      out.inputs.at(i, j) = means.at(c, j) + gauss(rng);
    }
  }
  return out;
}

PartitionPlan DirichletPartition(const LabeledDataset& dataset,
                                 std::size_t n_clients, double alpha,
                                 Rng& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("dirichlet concentration must be > 0");
  }
  if (n_clients < 1) throw ParameterError("n_clients must be >= 1");
  if (dataset.size() < n_clients) {
    throw ParameterError("dataset has fewer samples than clients");
  }
  PartitionPlan plan;
  plan.concentration = alpha;
  plan.assignments.resize(n_clients);

  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[dataset.labels[i]].push_back(i);
  }
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> p(n_clients);
  std::vector<std::size_t> count(n_clients);
  std::vector<std::size_t> order(n_clients);
  for (auto& rows : by_class) {
    if (rows.empty()) continue;
    std::shuffle(rows.begin(), rows.end(), rng);
    double sum = 0.0;
    for (double& v : p) {
      v = gamma(rng);
      sum += v;
    }
    if (!(sum > 0.0)) {
      // Every gamma draw underflowed (tiny alpha): the limit is a point mass.
      std::fill(p.begin(), p.end(), 0.0);
      p[std::uniform_int_distribution<std::size_t>(0, n_clients - 1)(rng)] =
          1.0;
      sum = 1.0;
    }
    const double m = static_cast<double>(rows.size());
    std::size_t dealt = 0;
    std::vector<double> frac(n_clients);
    for (std::size_t k = 0; k < n_clients; ++k) {
      const double share = p[k] / sum * m;
      count[k] = static_cast<std::size_t>(std::floor(share));
      frac[k] = share - static_cast<double>(count[k]);
      dealt += count[k];
    }
    // Largest remainder; ties go to the lower client id.
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return frac[a] > frac[b];
                     });
    for (std::size_t r = 0; dealt < rows.size(); ++r) {
      ++count[order[r % n_clients]];
      ++dealt;
    }
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n_clients; ++k) {
      for (std::size_t c = 0; c < count[k]; ++c) {
        plan.assignments[k].push_back(rows[pos++]);
      }
    }
  }
  for (std::size_t k = 0; k < n_clients; ++k) {
    if (!plan.assignments[k].empty()) continue;
    auto largest = std::max_element(
        plan.assignments.begin(), plan.assignments.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    plan.assignments[k].push_back(largest->back());
    largest->pop_back();
  }
  return plan;
}

std::vector<std::size_t> PoissonSelect(std::size_t n_clients, double q,
                                       Rng& rng) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw ParameterError("selection probability q must be in (0, 1]");
  }
  if (n_clients == 0) throw ParameterError("n_clients must be >= 1");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> chosen;
  while (chosen.empty()) {
    for (std::size_t k = 0; k < n_clients; ++k) {
      if (u(rng) < q) chosen.push_back(k);
    }
  }
  return chosen;
}

LabeledDataset ReadCsvDataset(std::istream& in, std::uint32_t num_classes) {
  std::string line;
  if (!std::getline(in, line)) throw ProtocolError("dataset CSV is empty");
  std::size_t dim = 0;
  {
    std::stringstream header(line);
    std::string cell;
    std::getline(header, cell, ',');
    if (cell != "label") {
      throw ProtocolError("dataset CSV header must start with `label`");
    }
    while (std::getline(header, cell, ',')) {
      if (cell != "f" + std::to_string(dim)) {
        throw ProtocolError("unexpected dataset CSV column `" + cell + "`");
      }
      ++dim;
    }
  }
  if (dim == 0) throw ProtocolError("dataset CSV has no feature columns");
  std::vector<double> values;
  std::vector<std::uint32_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        if (cols == 0) {
          const long long v = std::stoll(cell, &used);
          if (v < 0 || used != cell.size()) throw std::invalid_argument(cell);
          labels.push_back(static_cast<std::uint32_t>(v));
        } else {
          values.push_back(std::stod(cell, &used));
          if (used != cell.size()) throw std::invalid_argument(cell);
        }
      } catch (const std::logic_error&) {
        throw ProtocolError("dataset CSV line " + std::to_string(line_no) +
                            ": bad value `" + cell + "`");
      }
      ++cols;
    }
    if (cols != dim + 1) {
      throw ProtocolError("dataset CSV line " + std::to_string(line_no) +
                          " has " + std::to_string(cols) + " columns");
    }
  }
  LabeledDataset out;
  out.inputs.rows = labels.size();
  out.inputs.cols = dim;
  out.inputs.data = std::move(values);
  out.labels = std::move(labels);
  std::uint32_t max_label = 0;
  for (auto y : out.labels) max_label = std::max(max_label, y);
  out.num_classes = num_classes != 0 ? num_classes : max_label + 1;
  out.Validate();
  return out;
}

LabeledDataset LoadCsvDataset(const std::string& path,
                              std::uint32_t num_classes) {
  std::ifstream in(path);
  if (!in) throw ProtocolError("cannot open dataset file " + path);
  return ReadCsvDataset(in, num_classes);
}

void WriteCsvDataset(std::ostream& out, const LabeledDataset& dataset) {
  out << "label";
  for (std::size_t j = 0; j < dataset.dim(); ++j) out << ",f" << j;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << dataset.labels[i];
    for (double v : dataset.inputs.row(i)) out << ',' << v;
    out << '\n';
  }
}

}  // namespace shieldfl
