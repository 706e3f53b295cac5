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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "shieldfl/data.h"
#include "shieldfl/errors.h"

namespace shieldfl {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void PutU32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void PutBytes(std::ostream& out, const std::vector<std::uint8_t>& bytes) {
  PutU32(out, static_cast<std::uint32_t>(bytes.size()));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void PutF64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  PutU32(out, static_cast<std::uint32_t>(bits));
  PutU32(out, static_cast<std::uint32_t>(bits >> 32));
}

// Ratio of the effective noise std to the clipping norm.
double EffectiveSigma(const DpParams& dp, std::size_t participants) {
  return dp.noise_scaling == NoiseScaling::kPerParticipant
             ? dp.sigma * std::sqrt(static_cast<double>(participants))
             : dp.sigma;
}

}  // namespace

ClientUpdateResult ClientUpdate(const Mlp& model, ClientState& client,
                                const TrainOptions& options) {
  ClientUpdateResult result;
  const auto start = Clock::now();
  auto trained =
      model.LocalTrain(client.model, client.data, options.local_epochs,
                       options.lr, options.batch_size, client.train_rng);
  result.local_model = std::move(trained.params);
  result.delta = std::move(trained.delta);
  result.scores =
      ScoreParameters(model, result.local_model, client.data,
                      options.fisher_mode, options.fisher_max_samples);
  result.mask = LocalMask(result.scores.normalized, client.tau);
  result.train_seconds = Seconds(start);
  return result;
}

ClientUpload Protect(ClientState& client, const LayeredParameters& delta,
                     const ZonePartition& zones, const he::PublicKey& pk,
                     const he::FixedPointCodec& codec, std::size_t participants,
                     ProtectTiming* timing) {
  if (zones.universe != delta.size()) {
    throw ShapeError("zone universe " + std::to_string(zones.universe) +
                     " != update size " + std::to_string(delta.size()));
  }
  ClientUpload upload;
  upload.client_id = client.id;

  std::vector<double> enc_values;
  enc_values.reserve(zones.enc.size());
  for (std::uint32_t j : zones.enc.indices()) enc_values.push_back(delta.values[j]);
  const auto start = Clock::now();
  upload.ciphertext = he::EncryptVector<he::Paillier>(pk, enc_values, codec,
                                                      client.encrypt_rng);
  if (timing != nullptr) timing->encrypt_seconds = Seconds(start);

  std::vector<double> noise_values;
  noise_values.reserve(zones.noise.size());
  for (std::uint32_t j : zones.noise.indices()) {
    noise_values.push_back(delta.values[j]);
  }
  const auto clipped = ClipL2(noise_values, client.dp.clip_norm);
  upload.plaintext.indices = zones.noise.indices();
  upload.plaintext.values =
      GaussianNoise(clipped, client.dp.clip_norm, client.dp.sigma,
                    participants, client.dp.noise_scaling, client.noise_rng);
  return upload;
}

AggregateResult AggCombine(const he::PublicKey& pk,
                           std::vector<const ClientUpload*> uploads,
                           const SensitivityMask& enc) {
  if (uploads.empty()) throw ProtocolError("no uploads to aggregate");
  std::sort(uploads.begin(), uploads.end(),
            [](const ClientUpload* a, const ClientUpload* b) {
              return a->client_id < b->client_id;
            });
  const std::size_t universe = enc.universe();
  AggregateResult out;
  out.enc = enc;
  out.uploads = uploads.size();

  std::vector<double> sums(universe, 0.0);
  std::vector<std::uint32_t> counts(universe, 0);
  for (std::size_t i = 0; i < uploads.size(); ++i) {
    const ClientUpload& u = *uploads[i];
    if (u.ciphertext.slot_count != enc.size()) {
      throw ProtocolError("client " + std::to_string(u.client_id) +
                          " sent " + std::to_string(u.ciphertext.slot_count) +
                          " encrypted values, expected " +
                          std::to_string(enc.size()));
    }
    out.ciphertext_sum = i == 0 ? u.ciphertext
                                : he::AddCiphertexts<he::Paillier>(
                                      pk, out.ciphertext_sum, u.ciphertext);
    if (u.plaintext.indices.size() != u.plaintext.values.size()) {
      throw ProtocolError("malformed plaintext part from client " +
                          std::to_string(u.client_id));
    }
    for (std::size_t k = 0; k < u.plaintext.indices.size(); ++k) {
      const std::uint32_t j = u.plaintext.indices[k];
      if (j >= universe || enc.Contains(j)) {
        throw ProtocolError("client " + std::to_string(u.client_id) +
                            " sent index " + std::to_string(j) +
                            " in the clear");
      }
      sums[j] += u.plaintext.values[k];
      ++counts[j];
    }
  }
  for (std::size_t j = 0; j < universe; ++j) {
    if (counts[j] == 0) continue;
    out.indices.push_back(static_cast<std::uint32_t>(j));
    out.sums.push_back(sums[j]);
    out.contributors.push_back(counts[j]);
  }
  return out;
}

NegotiationResult AggregationServer::NegotiateMasks(
    std::vector<SensitivityMask> local_masks, double rho) {
  auto result = Negotiate(local_masks, rho);
  masks_ = std::move(local_masks);
  enc_ = result.enc;
  return result;
}

void AggregationServer::Receive(ClientUpload upload) {
  uploads_.push_back(std::move(upload));
}

AggregateResult AggregationServer::Combine() const {
  std::vector<const ClientUpload*> ptrs;
  for (const auto& u : uploads_) ptrs.push_back(&u);
  return AggCombine(pk_, std::move(ptrs), enc_);
}

void AggregationServer::ClearRound() {
  masks_.clear();
  uploads_.clear();
}

KeyServer KeyServer::Generate(std::size_t modulus_bits, Rng& rng,
                              LayeredParameters global) {
  return KeyServer(he::Paillier::KeyGen(modulus_bits, rng), std::move(global));
}

std::vector<double> KeyServer::DecryptSum(const he::PackedCiphertext& ct,
                                          std::size_t participants) const {
  return he::DecryptVector<he::Paillier>(keys_.sk, ct, participants);
}

FinalizeResult KeyServer::Finalize(const AggregateResult& aggregate,
                                   std::size_t participants, double server_lr,
                                   AggregationDivisor divisor) {
  if (participants == 0 || aggregate.uploads != participants) {
    throw ProtocolError("aggregate holds " + std::to_string(aggregate.uploads) +
                        " uploads, expected " + std::to_string(participants));
  }
  if (aggregate.enc.universe() != global_.size()) {
    throw ShapeError("aggregate universe does not match the global model");
  }
  FinalizeResult out;
  const auto start = Clock::now();
  out.enc_sum = DecryptSum(aggregate.ciphertext_sum, participants);
  out.decrypt_seconds = Seconds(start);

  const double k = static_cast<double>(participants);
  out.update.assign(global_.size(), 0.0);
  const auto& enc = aggregate.enc.indices();
  for (std::size_t i = 0; i < enc.size(); ++i) out.update[enc[i]] = out.enc_sum[i] / k;
  for (std::size_t i = 0; i < aggregate.indices.size(); ++i) {
    const double d = divisor == AggregationDivisor::kContributors
                         ? static_cast<double>(aggregate.contributors[i])
                         : k;
    out.update[aggregate.indices[i]] = aggregate.sums[i] / d;
  }
  for (std::size_t j = 0; j < global_.size(); ++j) {
    global_.values[j] += server_lr * out.update[j];
  }
  return out;
}

LayeredParameters ClientMerge(const LayeredParameters& local,
                              const LayeredParameters& global,
                              const SensitivityMask& pers) {
  if (local.size() != global.size() || pers.universe() != global.size()) {
    throw ProtocolError("merge shapes differ: local " +
                        std::to_string(local.size()) + ", global " +
                        std::to_string(global.size()) + ", mask " +
                        std::to_string(pers.universe()));
  }
  LayeredParameters out = global;
  for (std::uint32_t j : pers.indices()) out.values[j] = local.values[j];
  return out;
}

double ResolveServerLr(const ExperimentConfig& config,
                       std::size_t participants) {
  switch (config.server_lr_mode) {
    case ServerLrMode::kFedAvgEquiv:
      return 1.0;
    case ServerLrMode::kParticipants:
      return static_cast<double>(participants);
    case ServerLrMode::kExplicit:
      return config.server_lr;
  }
  return 1.0;
}

DataSplit LoadExperimentData(const ExperimentConfig& config) {
  config.Validate();
  DataSplit split;
  Rng rng(DeriveSeed(config.seed, kSeedData));
  if (config.dataset == DatasetSource::kSynth) {
    auto all = SynthDataset(config.synth_classes, config.synth_dim,
                            config.synth_train + config.synth_test,
                            config.synth_separation, rng);
    std::vector<std::size_t> train(config.synth_train);
    std::iota(train.begin(), train.end(), std::size_t{0});
    std::vector<std::size_t> test(config.synth_test);
    std::iota(test.begin(), test.end(), config.synth_train);
    split.train = all.Subset(train);
    split.test = all.Subset(test);
    return split;
  }
  auto train = LoadCsvDataset(config.dataset_path);
  if (!config.test_path.empty()) {
    auto test = LoadCsvDataset(config.test_path);
    if (test.dim() != train.dim()) {
      throw ConfigError("test_path", "feature count differs from dataset_path");
    }
    const auto classes = std::max(train.num_classes, test.num_classes);
    train.num_classes = classes;
    test.num_classes = classes;
    split.train = std::move(train);
    split.test = std::move(test);
    return split;
  }
  if (train.size() < 2) throw ConfigError("dataset_path", "need at least 2 rows");
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  auto n_test = static_cast<std::size_t>(
      std::llround(config.test_fraction * static_cast<double>(train.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, train.size() - 1);
  std::vector<std::size_t> test_rows(order.begin(), order.begin() + n_test);
  std::vector<std::size_t> train_rows(order.begin() + n_test, order.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  split.test = train.Subset(test_rows);
  split.train = train.Subset(train_rows);
  return split;
}

Simulation::Simulation(const ExperimentConfig& config)
    : Simulation(config, LoadExperimentData(config)) {}

Simulation::Simulation(const ExperimentConfig& config, DataSplit data)
    : config_(config),
      model_(ModelSpec{data.train.dim(), config.hidden1, config.hidden2,
                       data.train.num_classes}),
      test_(std::move(data.test)),
      ledger_(config.alpha_grid),
      codec_{static_cast<unsigned>(config.frac_bits),
             static_cast<unsigned>(config.int_bits),
             static_cast<unsigned>(config.guard_bits)},
      select_rng_(DeriveSeed(config.seed, kSeedSelect)) {
  if (config_.n_clients > codec_.max_summands()) {
    throw ConfigError("n_clients", "exceeds the 2^guard_bits summation budget");
  }
  if (data.train.size() < config_.n_clients) {
    throw ConfigError("n_clients", "more clients than training rows");
  }
  Rng init_rng(DeriveSeed(config_.seed, kSeedInit));
  auto global = model_.Init(init_rng);
  Rng key_rng(DeriveSeed(config_.seed, kSeedKeys));
  key_server_ = std::make_unique<KeyServer>(
      KeyServer::Generate(config_.modulus_bits, key_rng, global));
  agg_server_ = std::make_unique<AggregationServer>(key_server_->public_key());

  Rng part_rng(DeriveSeed(config_.seed, kSeedPartition));
  const auto plan = DirichletPartition(data.train, config_.n_clients,
                                       config_.dirichlet_alpha, part_rng);
  DpParams dp;
  dp.clip_norm = config_.clip;
  dp.sigma = config_.sigma;
  dp.noise_scaling = config_.noise_scaling;
  dp.alpha_grid = config_.alpha_grid;
  if (config_.attack && config_.attack_ablation) {
    dp.clip_norm = std::numeric_limits<double>::infinity();
    dp.sigma = 0.0;
  }
  const std::size_t universe = model_.num_params();
  clients_.reserve(config_.n_clients);
  for (std::size_t k = 0; k < config_.n_clients; ++k) {
    ClientState c;
    c.id = k;
    c.data = data.train.Subset(plan.assignments[k]);
    c.model = global;
    c.pers = SensitivityMask(universe);
    c.tau = config_.tau;
    c.dp = dp;
    c.train_rng.seed(DeriveSeed(config_.seed, kSeedClientTrain + k));
    c.noise_rng.seed(DeriveSeed(config_.seed, kSeedClientNoise + k));
    c.encrypt_rng.seed(DeriveSeed(config_.seed, kSeedClientEncrypt + k));
    clients_.push_back(std::move(c));
  }
}

TrainOptions Simulation::train_options() const {
  TrainOptions o;
  o.local_epochs = config_.local_epochs;
  o.lr = config_.lr;
  o.batch_size = config_.batch_size;
  o.fisher_mode = config_.fisher_mode;
  o.fisher_max_samples = config_.fisher_max_samples;
  return o;
}

RoundReport Simulation::Step() {
  ++round_;
  RoundTrace trace;
  trace.round = round_;
  trace.participants = PoissonSelect(clients_.size(), config_.q, select_rng_);
  trace.global_before = key_server_->global_model();
  const std::size_t k_t = trace.participants.size();

  RoundReport report;
  report.round = round_;
  report.participants = trace.participants;
  report.delta = config_.delta;

  const TrainOptions options = train_options();
  std::vector<LayeredParameters> local_models;
  for (std::size_t id : trace.participants) {
    auto r = ClientUpdate(model_, clients_[id], options);
    report.timings.train += r.train_seconds;
    if (fisher_sink_) fisher_sink_(round_, id, r.scores);
    local_models.push_back(std::move(r.local_model));
    trace.deltas.push_back(std::move(r.delta));
    trace.local_masks.push_back(std::move(r.mask));
  }

  trace.negotiation = agg_server_->NegotiateMasks(trace.local_masks, config_.rho);

  for (std::size_t i = 0; i < k_t; ++i) {
    ProtectTiming t;
    agg_server_->Receive(Protect(clients_[trace.participants[i]],
                                 trace.deltas[i], trace.negotiation.zones[i],
                                 agg_server_->public_key(), codec_, k_t, &t));
    report.timings.encrypt += t.encrypt_seconds;
  }

  const auto agg_start = Clock::now();
  trace.aggregate = agg_server_->Combine();
  report.timings.aggregate = Seconds(agg_start);

  trace.finalize = key_server_->Finalize(
      trace.aggregate, k_t, ResolveServerLr(config_, k_t), config_.divisor);
  report.timings.decrypt = trace.finalize.decrypt_seconds;
  trace.global_after = key_server_->global_model();

  std::vector<bool> took_part(clients_.size(), false);
  for (std::size_t i = 0; i < k_t; ++i) {
    ClientState& c = clients_[trace.participants[i]];
    const ZonePartition& z = trace.negotiation.zones[i];
    c.pers = z.pers;
    c.model = ClientMerge(local_models[i], trace.global_after, z.pers);
    took_part[c.id] = true;
    report.client_ratios.push_back({z.enc_ratio(), z.pers_ratio(),
                                    z.noise_ratio()});
  }
  for (auto& c : clients_) {
    if (!took_part[c.id]) c.model = trace.global_after;
  }
  for (const auto& r : report.client_ratios) {
    report.ratios.enc += r.enc / static_cast<double>(k_t);
    report.ratios.pers += r.pers / static_cast<double>(k_t);
    report.ratios.noise += r.noise / static_cast<double>(k_t);
  }

  ledger_.ComposeRound(EffectiveSigma(clients_.front().dp, k_t));
  report.privacy = ledger_.Best(config_.delta);
  report.accuracy = model_.Evaluate(trace.global_after, test_);

  trace.uploads = agg_server_->uploads();
  if (message_log_ != nullptr) LogRound(trace);
  agg_server_->ClearRound();
  if (observer_) observer_(trace);
  return report;
}

std::vector<RoundReport> Simulation::Run() {
  std::vector<RoundReport> reports;
  while (round_ < config_.rounds) reports.push_back(Step());
  return reports;
}

// Record layout, all integers little-endian: "SFLR", round, participant
// count, the consensus mask, then per upload: client id, local mask,
// ciphertext, plaintext count and (index, f64) pairs.
void Simulation::LogRound(const RoundTrace& trace) {
  std::ostream& out = *message_log_;
  out.write("SFLR", 4);
  PutU32(out, static_cast<std::uint32_t>(trace.round));
  PutU32(out, static_cast<std::uint32_t>(trace.participants.size()));
  PutBytes(out, trace.negotiation.enc.Serialize());
  for (std::size_t i = 0; i < trace.uploads.size(); ++i) {
    const ClientUpload& u = trace.uploads[i];
    PutU32(out, static_cast<std::uint32_t>(u.client_id));
    PutBytes(out, trace.local_masks[i].Serialize());
    PutBytes(out, he::SerializeCiphertext(u.ciphertext));
    PutU32(out, static_cast<std::uint32_t>(u.plaintext.indices.size()));
    for (std::size_t k = 0; k < u.plaintext.indices.size(); ++k) {
      PutU32(out, u.plaintext.indices[k]);
      PutF64(out, u.plaintext.values[k]);
    }
  }
  if (!out) throw std::runtime_error("failed to write the message log");
}

std::vector<RoundReport> RunExperiment(const ExperimentConfig& config) {
  Simulation sim(config);
  return sim.Run();
}

}  // namespace shieldfl
