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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "shieldfl/errors.h"
#include "shieldfl/model.h"

namespace shieldfl {
namespace {

std::vector<std::size_t> ClassHistogram(const LabeledDataset& d,
                                        const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> h(d.num_classes, 0);
  for (std::size_t r : rows) ++h[d.labels[r]];
  return h;
}

TEST(SynthDatasetTest, OneSamplePerClassWhenNEqualsC) {
  Rng rng(1);
  const auto d = SynthDataset(10, 20, 10, 4.0, rng);
  std::vector<std::uint32_t> labels = d.labels;
  std::sort(labels.begin(), labels.end());
  for (std::uint32_t c = 0; c < 10; ++c) EXPECT_EQ(labels[c], c);
}

TEST(SynthDatasetTest, BalancedAndShaped) {
  Rng rng(2);
  const auto d = SynthDataset(7, 5, 100, 3.0, rng);
  d.Validate();
  EXPECT_EQ(d.size(), 100u);
  EXPECT_EQ(d.dim(), 5u);
  std::vector<std::size_t> all(100);
  for (std::size_t i = 0; i < 100; ++i) all[i] = i;
  for (std::size_t n : ClassHistogram(d, all)) {
    EXPECT_TRUE(n == 14 || n == 15);
  }
}

double TrainAndScore(double separation) {
  Rng rng(7);
  const auto train = SynthDataset(10, 20, 1000, separation, rng);
  Rng rng_test(7);
  const auto all = SynthDataset(10, 20, 1500, separation, rng_test);
  std::vector<std::size_t> rows;
  for (std::size_t i = 1000; i < 1500; ++i) rows.push_back(i);
  const auto test = all.Subset(rows);
  Mlp m(ModelSpec{20, 32, 16, 10});
  Rng init(1);
  auto p = m.Init(init);
  p = m.LocalTrain(p, train, 20, 0.05, 32, init).params;
  return m.Evaluate(p, test);
}

TEST(SynthDatasetTest, WellSeparatedClassesAreLearnable) {
  EXPECT_GE(TrainAndScore(10.0), 0.95);
}

TEST(SynthDatasetTest, ZeroSeparationIsChance) {
  EXPECT_NEAR(TrainAndScore(0.0), 0.1, 0.1);
}

TEST(DirichletPartitionTest, SingleClientGetsEverything) {
  Rng rng(3);
  const auto d = SynthDataset(4, 3, 40, 2.0, rng);
  const auto plan = DirichletPartition(d, 1, 0.5, rng);
  ASSERT_EQ(plan.assignments.size(), 1u);
  EXPECT_EQ(plan.assignments[0].size(), 40u);
}

TEST(DirichletPartitionTest, DisjointCoverNonEmptyOverRandomDraws) {
  Rng data_rng(4);
  const auto d = SynthDataset(10, 4, 300, 2.0, data_rng);
  std::uniform_real_distribution<double> log_alpha(-2.0, 3.0);
  Rng meta(99);
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = std::pow(10.0, log_alpha(meta));
    Rng rng(1000 + trial);
    const std::size_t clients = 1 + trial % 25;
    const auto plan = DirichletPartition(d, clients, alpha, rng);
    ASSERT_EQ(plan.assignments.size(), clients);
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& a : plan.assignments) {
      EXPECT_FALSE(a.empty());
      total += a.size();
      seen.insert(a.begin(), a.end());
    }
    EXPECT_EQ(total, d.size());
    EXPECT_EQ(seen.size(), d.size());
    EXPECT_LT(*seen.rbegin(), d.size());
  }
}

TEST(DirichletPartitionTest, Deterministic) {
  Rng data_rng(4);
  const auto d = SynthDataset(10, 4, 300, 2.0, data_rng);
  Rng a(5), b(5);
  EXPECT_EQ(DirichletPartition(d, 8, 0.3, a).assignments,
            DirichletPartition(d, 8, 0.3, b).assignments);
}

TEST(DirichletPartitionTest, HugeConcentrationIsNearUniform) {
  Rng data_rng(6);
  const auto d = SynthDataset(10, 4, 4000, 2.0, data_rng);
  Rng rng(7);
  const auto plan = DirichletPartition(d, 20, 1e6, rng);
  for (const auto& a : plan.assignments) {
    for (std::size_t n : ClassHistogram(d, a)) {
      EXPECT_NEAR(static_cast<double>(n), 20.0, 2.0);
    }
  }
}

TEST(DirichletPartitionTest, SmallConcentrationSkews) {
  Rng data_rng(6);
  const auto d = SynthDataset(10, 4, 2000, 2.0, data_rng);
  int skewed_seeds = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto plan = DirichletPartition(d, 20, 0.2, rng);
    bool any = false;
    for (const auto& a : plan.assignments) {
      const auto h = ClassHistogram(d, a);
      const std::size_t top = *std::max_element(h.begin(), h.end());
      any = any || 2 * top >= a.size();
    }
    skewed_seeds += any;
  }
  EXPECT_GE(skewed_seeds, 8);
}

TEST(DirichletPartitionTest, Errors) {
  Rng rng(1);
  const auto d = SynthDataset(2, 2, 4, 1.0, rng);
  EXPECT_THROW(DirichletPartition(d, 5, 0.5, rng), ParameterError);
  EXPECT_THROW(DirichletPartition(d, 2, 0.0, rng), ParameterError);
  EXPECT_THROW(DirichletPartition(d, 0, 0.5, rng), ParameterError);
}

TEST(PoissonSelectTest, FullProbabilitySelectsAll) {
  Rng rng(1);
  const auto k = PoissonSelect(20, 1.0, rng);
  ASSERT_EQ(k.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(k[i], i);
}

TEST(PoissonSelectTest, MeanSizeMatchesQ) {
  Rng rng(2);
  double total = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) total += PoissonSelect(20, 0.5, rng).size();
  EXPECT_GE(total / draws, 9.7);
  EXPECT_LE(total / draws, 10.3);
}

TEST(PoissonSelectTest, NeverEmpty) {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const auto k = PoissonSelect(3, 0.01, rng);
    ASSERT_FALSE(k.empty());
    ASSERT_TRUE(std::is_sorted(k.begin(), k.end()));
  }
}

TEST(PoissonSelectTest, RejectsBadProbability) {
  Rng rng(1);
  EXPECT_THROW(PoissonSelect(5, 0.0, rng), ParameterError);
  EXPECT_THROW(PoissonSelect(5, 1.5, rng), ParameterError);
}

TEST(CsvDatasetTest, RoundTrip) {
  Rng rng(5);
  const auto d = SynthDataset(3, 4, 12, 2.0, rng);
  std::stringstream ss;
  WriteCsvDataset(ss, d);
  const auto back = ReadCsvDataset(ss);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.inputs.data, d.inputs.data);
  EXPECT_EQ(back.num_classes, 3u);
}

TEST(CsvDatasetTest, RejectsMalformed) {
  std::stringstream bad_header("x,f0\n1,2\n");
  EXPECT_THROW(ReadCsvDataset(bad_header), ProtocolError);
  std::stringstream bad_cell("label,f0\n1,abc\n");
  EXPECT_THROW(ReadCsvDataset(bad_cell), ProtocolError);
  std::stringstream ragged("label,f0,f1\n1,2\n");
  EXPECT_THROW(ReadCsvDataset(ragged), ProtocolError);
}

}  // namespace
}  // namespace shieldfl
