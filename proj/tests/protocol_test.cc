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
#include "shieldfl/protocol.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <type_traits>

#include "fedavg_oracle.h"
#include "shieldfl/errors.h"
#include "test_util.h"

namespace shieldfl {
namespace {

using testing::MaxAbsDiff;

// The aggregation path is typed against the public key only.
static_assert(!std::is_constructible_v<AggregationServer, he::SecretKey>);
static_assert(!std::is_convertible_v<he::SecretKey, he::PublicKey>);
static_assert(!std::is_invocable_v<decltype(&AggCombine), const he::SecretKey&,
                                   std::vector<const ClientUpload*>,
                                   const SensitivityMask&>);
static_assert(std::is_invocable_v<decltype(&AggCombine), const he::PublicKey&,
                                  std::vector<const ClientUpload*>,
                                  const SensitivityMask&>);

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.seed = 7;
  c.synth_classes = 4;
  c.synth_dim = 6;
  c.synth_train = 240;
  c.synth_test = 120;
  c.hidden1 = 12;
  c.hidden2 = 8;
  c.n_clients = 4;
  c.rounds = 3;
  c.local_epochs = 1;
  c.batch_size = 16;
  c.lr = 0.05;
  c.tau = 0.3;
  c.rho = 0.5;
  c.clip = 0.5;
  c.sigma = 0.5;
  c.modulus_bits = 512;
  return c;
}

const he::Paillier::KeyPair& TestKeys() {
  static const he::Paillier::KeyPair keys = [] {
    Rng rng(77);
    return he::Paillier::KeyGen(512, rng);
  }();
  return keys;
}

LayerLayout FlatLayout(std::size_t n) {
  LayerLayout l;
  l.Append("w", n);
  return l;
}

LayeredParameters Params(std::vector<double> v) {
  LayeredParameters p;
  p.layout = FlatLayout(v.size());
  p.values = std::move(v);
  return p;
}

ClientState BareClient(std::size_t id, std::size_t universe) {
  ClientState c;
  c.id = id;
  c.pers = SensitivityMask(universe);
  c.dp.clip_norm = 1e9;
  c.dp.sigma = 0.0;
  c.train_rng.seed(id);
  c.noise_rng.seed(100 + id);
  c.encrypt_rng.seed(200 + id);
  return c;
}

ZonePartition Zones(std::size_t u, std::vector<std::uint32_t> enc,
                    std::vector<std::uint32_t> pers) {
  ZonePartition z;
  z.universe = u;
  z.enc = SensitivityMask(u, std::move(enc));
  z.pers = SensitivityMask(u, std::move(pers));
  z.noise = NoiseMask(u, z.enc, z.pers);
  return z;
}

TEST(InitTest, DefaultsToTwentyClients) {
  ExperimentConfig c;
  EXPECT_EQ(c.n_clients, 20u);
  EXPECT_EQ(c.rounds, 10u);
  EXPECT_EQ(c.local_epochs, 5u);
  EXPECT_EQ(c.batch_size, 32u);
  EXPECT_EQ(c.lr, 0.01);
  c.modulus_bits = 512;
  Simulation sim(c);
  EXPECT_EQ(sim.clients().size(), 20u);
  for (const auto& client : sim.clients()) EXPECT_FALSE(client.data.empty());
}

TEST(InitTest, ZeroClientsIsAConfigError) {
  auto c = SmallConfig();
  c.n_clients = 0;
  try {
    Simulation sim(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "n_clients");
  }
}

TEST(InitTest, SameSeedSameInitialModel) {
  Simulation a(SmallConfig()), b(SmallConfig());
  EXPECT_EQ(a.key_server().global_model().values,
            b.key_server().global_model().values);
  auto c = SmallConfig();
  c.seed = 8;
  Simulation d(c);
  EXPECT_NE(a.key_server().global_model().values,
            d.key_server().global_model().values);
}

TEST(ClientUpdateTest, ZeroLearningRateStillScores) {
  Simulation sim(SmallConfig());
  ClientState client = sim.clients()[0];
  auto options = sim.train_options();
  options.lr = 0.0;
  const auto r = ClientUpdate(sim.model(), client, options);
  for (double d : r.delta.values) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(r.local_model.values, client.model.values);
  double total = 0.0;
  for (double s : r.scores.raw) total += s;
  EXPECT_GT(total, 0.0);
}

TEST(ClientUpdateTest, TauAboveOneGivesEmptyMask) {
  Simulation sim(SmallConfig());
  ClientState client = sim.clients()[1];
  client.tau = 1.5;
  EXPECT_TRUE(ClientUpdate(sim.model(), client, sim.train_options()).mask.empty());
}

TEST(ClientUpdateTest, Reproducible) {
  Simulation a(SmallConfig()), b(SmallConfig());
  for (std::size_t k = 0; k < 2; ++k) {
    ClientState ca = a.clients()[k], cb = b.clients()[k];
    EXPECT_EQ(ClientUpdate(a.model(), ca, a.train_options()).mask,
              ClientUpdate(b.model(), cb, b.train_options()).mask);
  }
}

TEST(ProtectTest, EmptyEncZoneGivesEmptyCiphertext) {
  ClientState c = BareClient(0, 4);
  const auto u = Protect(c, Params({1, 2, 3, 4}), Zones(4, {}, {1}),
                         TestKeys().pk, he::FixedPointCodec{}, 2);
  EXPECT_EQ(u.ciphertext.slot_count, 0u);
  EXPECT_TRUE(u.ciphertext.chunks.empty());
  EXPECT_EQ(u.plaintext.indices, (std::vector<std::uint32_t>{0, 2, 3}));
}

TEST(ProtectTest, EmptyNoiseZoneGivesEmptyPlaintext) {
  ClientState c = BareClient(0, 3);
  const auto u = Protect(c, Params({1, 2, 3}), Zones(3, {0, 1}, {2}),
                         TestKeys().pk, he::FixedPointCodec{}, 2);
  EXPECT_TRUE(u.plaintext.indices.empty());
  EXPECT_TRUE(u.plaintext.values.empty());
  EXPECT_EQ(u.ciphertext.slot_count, 2u);
}

TEST(ProtectTest, NoiselessAllPlaintextIsClippedUpdate) {
  ClientState c = BareClient(0, 3);
  c.dp.clip_norm = 1.0;
  const auto u = Protect(c, Params({3, 0, 4}), Zones(3, {}, {}),
                         TestKeys().pk, he::FixedPointCodec{}, 1);
  EXPECT_EQ(u.plaintext.values, ClipL2(std::vector<double>{3, 0, 4}, 1.0));
}

TEST(ProtectTest, PersonalizedCoordinatesNeverLeave) {
  ClientState c = BareClient(0, 6);
  c.dp.sigma = 1.0;
  c.dp.clip_norm = 1.0;
  const auto z = Zones(6, {0, 5}, {2, 3});
  const auto u = Protect(c, Params({1, 2, 3, 4, 5, 6}), z, TestKeys().pk,
                         he::FixedPointCodec{}, 3);
  EXPECT_EQ(u.ciphertext.slot_count, 2u);
  EXPECT_EQ(u.plaintext.indices, (std::vector<std::uint32_t>{1, 4}));
  const auto dec = he::DecryptVector<he::Paillier>(TestKeys().sk, u.ciphertext, 1);
  EXPECT_NEAR(dec[0], 1.0, 1e-9);
  EXPECT_NEAR(dec[1], 6.0, 1e-9);
}

TEST(ProtectTest, OutOfRangeEncValueIsRangeError) {
  ClientState c = BareClient(0, 2);
  EXPECT_THROW(Protect(c, Params({1e6, 0}), Zones(2, {0}, {}), TestKeys().pk,
                       he::FixedPointCodec{}, 1),
               RangeError);
}

ClientUpload PlainUpload(std::size_t id, std::vector<std::uint32_t> idx,
                         std::vector<double> val) {
  ClientUpload u;
  u.client_id = id;
  Rng rng(id);
  u.ciphertext = he::EncryptVector<he::Paillier>(
      TestKeys().pk, std::vector<double>{}, he::FixedPointCodec{}, rng);
  u.plaintext.indices = std::move(idx);
  u.plaintext.values = std::move(val);
  return u;
}

TEST(AggCombineTest, SingleUploadPassesThrough) {
  const auto u = PlainUpload(0, {1, 3}, {0.5, -2.0});
  const auto r = AggCombine(TestKeys().pk, {&u}, SensitivityMask(5));
  EXPECT_EQ(r.indices, u.plaintext.indices);
  EXPECT_EQ(r.sums, u.plaintext.values);
  EXPECT_EQ(r.contributors, (std::vector<std::uint32_t>{1, 1}));
  EXPECT_EQ(r.uploads, 1u);
}

TEST(AggCombineTest, HandSums) {
  const auto a = PlainUpload(2, {0, 1, 4}, {1.0, 2.0, 3.0});
  const auto b = PlainUpload(0, {1, 2}, {10.0, 20.0});
  const auto c = PlainUpload(1, {1, 4}, {100.0, 300.0});
  const auto r = AggCombine(TestKeys().pk, {&a, &b, &c}, SensitivityMask(5));
  EXPECT_EQ(r.indices, (std::vector<std::uint32_t>{0, 1, 2, 4}));
  EXPECT_EQ(r.sums, (std::vector<double>{1.0, 112.0, 20.0, 303.0}));
  EXPECT_EQ(r.contributors, (std::vector<std::uint32_t>{1, 3, 1, 2}));
  EXPECT_EQ(r.ciphertext_sum.add_count, 2u);
}

TEST(AggCombineTest, CiphertextSumMatchesPlaintextOracle) {
  const std::size_t u = 30;
  const auto zones = Zones(u, {0, 3, 7, 8, 9, 10, 11, 12, 13, 20, 29}, {});
  Rng rng(3);
  std::vector<ClientUpload> uploads;
  std::vector<double> oracle(zones.enc.size(), 0.0);
  for (std::size_t k = 0; k < 5; ++k) {
    ClientState c = BareClient(k, u);
    const auto delta = testing::RandomVector(u, -8.0, 8.0, rng);
    for (std::size_t i = 0; i < zones.enc.size(); ++i) {
      oracle[i] += delta[zones.enc.indices()[i]];
    }
    uploads.push_back(
        Protect(c, Params(delta), zones, TestKeys().pk, he::FixedPointCodec{}, 5));
  }
  std::vector<const ClientUpload*> ptrs;
  for (const auto& up : uploads) ptrs.push_back(&up);
  const auto r = AggCombine(TestKeys().pk, ptrs, zones.enc);
  const auto dec =
      he::DecryptVector<he::Paillier>(TestKeys().sk, r.ciphertext_sum, 5);
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    EXPECT_LE(std::abs(dec[i] - oracle[i]), 5 * std::ldexp(1.0, -31));
  }
}

TEST(AggCombineTest, Errors) {
  EXPECT_THROW(AggCombine(TestKeys().pk, {}, SensitivityMask(3)), ProtocolError);
  const auto a = PlainUpload(0, {0}, {1.0});
  EXPECT_THROW(AggCombine(TestKeys().pk, {&a}, SensitivityMask(3, {0})),
               ProtocolError);
  ClientState c = BareClient(1, 3);
  const auto b = Protect(c, Params({1, 2, 3}), Zones(3, {1}, {}), TestKeys().pk,
                         he::FixedPointCodec{}, 2);
  EXPECT_THROW(AggCombine(TestKeys().pk, {&a, &b}, SensitivityMask(3)),
               ProtocolError);
}

TEST(KeyFinalizeTest, TwoClientPlaintextOracle) {
  // Two clients over 6 parameters. enc = {0, 1}; client 0 keeps 2 personal,
  // client 1 keeps 5 personal.
  const std::size_t u = 6;
  const auto z0 = Zones(u, {0, 1}, {2});
  const auto z1 = Zones(u, {0, 1}, {5});
  const std::vector<double> d0 = {0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
  const std::vector<double> d1 = {-0.3, 0.25, 1.0, -0.1, 0.2, 9.0};
  ClientState c0 = BareClient(0, u), c1 = BareClient(1, u);
  const auto u0 = Protect(c0, Params(d0), z0, TestKeys().pk, he::FixedPointCodec{}, 2);
  const auto u1 = Protect(c1, Params(d1), z1, TestKeys().pk, he::FixedPointCodec{}, 2);
  const auto agg = AggCombine(TestKeys().pk, {&u1, &u0}, z0.enc);

  const std::vector<double> start = {1, 1, 1, 1, 1, 1};
  KeyServer server(TestKeys(), Params(start));
  server.Finalize(agg, 2, 1.0, AggregationDivisor::kParticipants);
  // Coordinate 2 only came from client 1, coordinate 5 only from client 0;
  // both are still divided by the participant count.
  const std::vector<double> expected = {
      1 + (0.1 - 0.3) / 2, 1 + (-0.2 + 0.25) / 2, 1 + 1.0 / 2,
      1 + (0.4 - 0.1) / 2, 1 + (-0.5 + 0.2) / 2,  1 + 0.6 / 2};
  EXPECT_LE(MaxAbsDiff(server.global_model().values, expected), 1e-6);

  KeyServer by_count(TestKeys(), Params(start));
  by_count.Finalize(agg, 2, 1.0, AggregationDivisor::kContributors);
  EXPECT_NEAR(by_count.global_model().values[2], 2.0, 1e-12);
  EXPECT_NEAR(by_count.global_model().values[5], 1.6, 1e-12);
  EXPECT_NEAR(by_count.global_model().values[3], expected[3], 1e-12);
}

TEST(KeyFinalizeTest, WithheldCoordinateUnchanged) {
  const std::size_t u = 3;
  const auto z = Zones(u, {}, {1});
  ClientState c0 = BareClient(0, u), c1 = BareClient(1, u);
  const auto u0 = Protect(c0, Params({1, 2, 3}), z, TestKeys().pk, he::FixedPointCodec{}, 2);
  const auto u1 = Protect(c1, Params({1, 2, 3}), z, TestKeys().pk, he::FixedPointCodec{}, 2);
  const auto agg = AggCombine(TestKeys().pk, {&u0, &u1}, z.enc);
  KeyServer server(TestKeys(), Params({5, 5, 5}));
  const auto r = server.Finalize(agg, 2, 3.0, AggregationDivisor::kParticipants);
  EXPECT_EQ(r.update[1], 0.0);
  EXPECT_EQ(server.global_model().values[1], 5.0);
  EXPECT_DOUBLE_EQ(server.global_model().values[0], 5.0 + 3.0 * 1.0);
}

TEST(KeyFinalizeTest, ParticipantCountMustMatch) {
  const auto a = PlainUpload(0, {0}, {1.0});
  const auto agg = AggCombine(TestKeys().pk, {&a}, SensitivityMask(1));
  KeyServer server(TestKeys(), Params({0.0}));
  EXPECT_THROW(server.Finalize(agg, 2, 1.0, AggregationDivisor::kParticipants),
               ProtocolError);
  EXPECT_THROW(server.DecryptSum(agg.ciphertext_sum, 2), ProtocolError);
}

TEST(ClientMergeTest, Cases) {
  const auto local = Params({1, 2, 3});
  const auto global = Params({7, 8, 9});
  EXPECT_EQ(ClientMerge(local, global, SensitivityMask(3)).values, global.values);
  EXPECT_EQ(ClientMerge(local, global, SensitivityMask::Full(3)).values,
            local.values);
  EXPECT_EQ(ClientMerge(local, global, SensitivityMask(3, {0})).values,
            (std::vector<double>{1, 8, 9}));
  EXPECT_THROW(ClientMerge(local, global, SensitivityMask(4)), ProtocolError);
  EXPECT_THROW(ClientMerge(Params({1, 2}), global, SensitivityMask(3)),
               ProtocolError);
}

TEST(ServerLrTest, Modes) {
  ExperimentConfig c;
  EXPECT_EQ(ResolveServerLr(c, 7), 1.0);
  c.server_lr_mode = ServerLrMode::kParticipants;
  EXPECT_EQ(ResolveServerLr(c, 7), 7.0);
  c.server_lr_mode = ServerLrMode::kExplicit;
  c.server_lr = 0.25;
  EXPECT_EQ(ResolveServerLr(c, 7), 0.25);
}

TEST(RunTest, ZeroRoundsLeavesInitialModel) {
  auto c = SmallConfig();
  c.rounds = 0;
  Simulation sim(c);
  const auto init = sim.key_server().global_model().values;
  EXPECT_TRUE(sim.Run().empty());
  EXPECT_EQ(sim.key_server().global_model().values, init);
}

TEST(RunTest, RoundInvariants) {
  auto c = SmallConfig();
  c.q = 0.7;
  c.rounds = 4;
  Simulation sim(c);
  std::size_t traces = 0;
  sim.set_observer([&](const RoundTrace& t) {
    ++traces;
    const std::size_t k = t.participants.size();
    ASSERT_EQ(t.uploads.size(), k);
    std::vector<double> oracle(t.negotiation.enc.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const ClientUpload& u = t.uploads[i];
      const ZonePartition& z = t.negotiation.zones[i];
      EXPECT_EQ(u.client_id, t.participants[i]);
      EXPECT_EQ(u.ciphertext.slot_count, t.negotiation.enc.size());
      const SensitivityMask plain(z.universe, u.plaintext.indices);
      EXPECT_TRUE(plain.DisjointWith(z.pers));
      EXPECT_TRUE(plain.DisjointWith(t.negotiation.enc));
      EXPECT_TRUE(t.negotiation.enc.DisjointWith(z.pers));
      EXPECT_NEAR(z.enc_ratio() + z.pers_ratio() + z.noise_ratio(), 1.0, 1e-12);
      for (std::size_t e = 0; e < oracle.size(); ++e) {
        oracle[e] += t.deltas[i].values[t.negotiation.enc.indices()[e]];
      }
    }
    for (std::size_t e = 0; e < oracle.size(); ++e) {
      EXPECT_LE(std::abs(t.finalize.enc_sum[e] - oracle[e]),
                static_cast<double>(k) * std::ldexp(1.0, -31));
    }
  });
  const auto reports = sim.Run();
  EXPECT_EQ(traces, 4u);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) {
    EXPECT_NEAR(r.ratios.enc + r.ratios.pers + r.ratios.noise, 1.0, 1e-12);
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
    EXPECT_GT(r.privacy.eps, 0.0);
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    EXPECT_GE(reports[i].privacy.eps, reports[i - 1].privacy.eps);
  }
}

TEST(RunTest, PersonalizedCoordinatesStayLocal) {
  auto c = SmallConfig();
  c.rounds = 1;
  Simulation sim(c);
  RoundTrace trace;
  sim.set_observer([&](const RoundTrace& t) { trace = t; });
  sim.Step();
  for (std::size_t i = 0; i < trace.participants.size(); ++i) {
    const ClientState& client = sim.clients()[trace.participants[i]];
    const auto& pers = trace.negotiation.zones[i].pers;
    EXPECT_EQ(client.pers, pers);
    for (std::size_t j = 0; j < client.model.size(); ++j) {
      const double expected =
          pers.Contains(static_cast<std::uint32_t>(j))
              ? trace.global_before.values[j] + trace.deltas[i].values[j]
              : trace.global_after.values[j];
      EXPECT_NEAR(client.model.values[j], expected, 1e-15);
    }
  }
}

TEST(RunTest, Deterministic) {
  auto run = [] {
    Simulation sim(SmallConfig());
    std::vector<std::vector<double>> out;
    for (const auto& r : sim.Run()) {
      out.push_back({r.accuracy, r.ratios.enc, r.ratios.pers, r.privacy.eps});
    }
    out.push_back(sim.key_server().global_model().values);
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(RunTest, DpFedAvgReduction) {
  auto c = SmallConfig();
  c.tau = 2.0;  // no local masks: nothing encrypted, nothing personal
  c.sigma = 0.8;
  c.clip = 0.05;
  const auto oracle = testing::FedAvgOracle(c, 3, 1.0, true);
  Simulation sim(c);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto r = sim.Step();
    EXPECT_EQ(r.ratios.noise, 1.0);
    EXPECT_LE(MaxAbsDiff(sim.key_server().global_model().values, oracle[t]),
              1e-12);
  }
}

TEST(RunTest, NoiselessFedAvgReductionWithUnitServerStep) {
  auto c = SmallConfig();
  c.tau = 2.0;
  c.sigma = 0.0;
  c.clip = 1e9;
  const auto oracle = testing::FedAvgOracle(c, 3, 1.0, false);
  Simulation sim(c);
  for (std::size_t t = 0; t < 3; ++t) {
    sim.Step();
    EXPECT_LE(MaxAbsDiff(sim.key_server().global_model().values, oracle[t]),
              1e-12);
  }
}

TEST(RunTest, EncryptedFedAvgMatchesWithinQuantization) {
  auto c = SmallConfig();
  c.tau = -1.0;  // every coordinate sensitive: everything encrypted
  c.rho = 1.0;
  c.sigma = 0.0;
  c.clip = 1e9;
  c.n_clients = 3;
  c.rounds = 2;
  const auto oracle = testing::FedAvgOracle(c, 2, 1.0, false);
  Simulation sim(c);
  for (std::size_t t = 0; t < 2; ++t) {
    const auto r = sim.Step();
    EXPECT_EQ(r.ratios.enc, 1.0);
    EXPECT_LE(MaxAbsDiff(sim.key_server().global_model().values, oracle[t]),
              1e-6);
  }
}

TEST(RunTest, MessageLogRecordsEveryRound) {
  auto c = SmallConfig();
  c.rounds = 2;
  Simulation sim(c);
  std::stringstream log;
  sim.set_message_log(&log);
  sim.Run();
  const std::string bytes = log.str();
  ASSERT_GT(bytes.size(), 8u);
  EXPECT_EQ(bytes.substr(0, 4), "SFLR");
  EXPECT_NE(bytes.find("SFLR", 4), std::string::npos);
}

}  // namespace
}  // namespace shieldfl
