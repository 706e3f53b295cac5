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
#ifndef SHIELDFL_PROTOCOL_H_
#define SHIELDFL_PROTOCOL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "shieldfl/config.h"
#include "shieldfl/mask.h"
#include "shieldfl/model.h"
#include "shieldfl/negotiation.h"
#include "shieldfl/packing.h"
#include "shieldfl/privacy.h"
#include "shieldfl/sensitivity.h"
#include "shieldfl/types.h"

namespace shieldfl {

// Stream tags passed to DeriveSeed(config.seed, tag). Per-client streams add
// the client id to the base tag.
inline constexpr std::uint64_t kSeedData = 1;
inline constexpr std::uint64_t kSeedPartition = 2;
inline constexpr std::uint64_t kSeedInit = 3;
inline constexpr std::uint64_t kSeedKeys = 4;
inline constexpr std::uint64_t kSeedSelect = 5;
inline constexpr std::uint64_t kSeedClientTrain = 0x1000;
inline constexpr std::uint64_t kSeedClientNoise = 0x2000;
inline constexpr std::uint64_t kSeedClientEncrypt = 0x3000;

struct ClientState {
  std::size_t id = 0;
  LabeledDataset data;
  LayeredParameters model;  // theta_n^{t-1}
  SensitivityMask pers;     // personalized zone of the latest round
  double tau = 0.0;
  DpParams dp;
  Rng train_rng;
  Rng noise_rng;
  Rng encrypt_rng;
};

struct TrainOptions {
  std::size_t local_epochs = 5;
  double lr = 0.01;
  std::size_t batch_size = 32;
  FisherMode fisher_mode = FisherMode::kPerSampleAvg;
  std::size_t fisher_max_samples = 0;
};

struct ClientUpdateResult {
  LayeredParameters local_model;  // after training
  LayeredParameters delta;
  FisherScores scores;  // on the trained model
  SensitivityMask mask;
  double train_seconds = 0.0;
};

// Local training from the client's current model, then Fisher scoring and
// the local sensitivity mask on the trained model.
ClientUpdateResult ClientUpdate(const Mlp& model, ClientState& client,
                                const TrainOptions& options);

// Noise-zone part of an upload: ascending indices and their noisy values.
struct SparseUpdate {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
};

struct ClientUpload {
  std::size_t client_id = 0;
  he::PackedCiphertext ciphertext;  // enc-zone slice, ascending index order
  SparseUpdate plaintext;           // clipped and noised noise-zone slice
};

struct ProtectTiming {
  double encrypt_seconds = 0.0;
};

// Builds the upload for one client. Personalized coordinates are omitted.
ClientUpload Protect(ClientState& client, const LayeredParameters& delta,
                     const ZonePartition& zones, const he::PublicKey& pk,
                     const he::FixedPointCodec& codec, std::size_t participants,
                     ProtectTiming* timing = nullptr);

struct AggregateResult {
  SensitivityMask enc;
  he::PackedCiphertext ciphertext_sum;
  // Per-index sums of the plaintext parts, ascending by index, with the
  // number of uploads that carried each index.
  std::vector<std::uint32_t> indices;
  std::vector<double> sums;
  std::vector<std::uint32_t> contributors;
  std::size_t uploads = 0;
};

// Homomorphic sum of the ciphertexts and per-index sums of the plaintext
// parts, folded in ascending client-id order. Throws ProtocolError on an
// empty upload list or enc slices of differing shape.
AggregateResult AggCombine(const he::PublicKey& pk,
                           std::vector<const ClientUpload*> uploads,
                           const SensitivityMask& enc);

// The aggregation server. It only ever holds the public key.
class AggregationServer {
 public:
  explicit AggregationServer(he::PublicKey pk) : pk_(std::move(pk)) {}

  const he::PublicKey& public_key() const { return pk_; }

  // Stores the received local masks and returns the broadcast consensus.
  NegotiationResult NegotiateMasks(std::vector<SensitivityMask> local_masks,
                                   double rho);
  void Receive(ClientUpload upload);
  AggregateResult Combine() const;
  void ClearRound();

  const std::vector<ClientUpload>& uploads() const { return uploads_; }
  const std::vector<SensitivityMask>& received_masks() const {
    return masks_;
  }
  const SensitivityMask& enc_mask() const { return enc_; }

 private:
  he::PublicKey pk_;
  std::vector<SensitivityMask> masks_;
  SensitivityMask enc_;
  std::vector<ClientUpload> uploads_;
};

struct FinalizeResult {
  std::vector<double> enc_sum;  // decrypted enc-zone sums
  std::vector<double> update;   // full-length sum / divisor, before eta_g
  double decrypt_seconds = 0.0;
};

// The key server: sole holder of the secret key and owner of the global
// model.
class KeyServer {
 public:
  KeyServer(he::Paillier::KeyPair keys, LayeredParameters global)
      : keys_(std::move(keys)), global_(std::move(global)) {}
  static KeyServer Generate(std::size_t modulus_bits, Rng& rng,
                            LayeredParameters global);

  const he::PublicKey& public_key() const { return keys_.pk; }
  const LayeredParameters& global_model() const { return global_; }

  // Decrypts an aggregate of exactly `participants` ciphertexts.
  std::vector<double> DecryptSum(const he::PackedCiphertext& ct,
                                 std::size_t participants) const;

  // Scatters the decrypted enc sums and the plaintext sums into a full
  // update, divides, and applies theta += server_lr * update.
  FinalizeResult Finalize(const AggregateResult& aggregate,
                          std::size_t participants, double server_lr,
                          AggregationDivisor divisor);

 private:
  he::Paillier::KeyPair keys_;
  LayeredParameters global_;
};

// pers ? local : global, coordinate-wise.
LayeredParameters ClientMerge(const LayeredParameters& local,
                              const LayeredParameters& global,
                              const SensitivityMask& pers);

double ResolveServerLr(const ExperimentConfig& config, std::size_t participants);

struct ZoneRatios {
  double enc = 0.0;
  double pers = 0.0;
  double noise = 0.0;
};

struct StageTimings {
  double train = 0.0;
  double encrypt = 0.0;
  double aggregate = 0.0;
  double decrypt = 0.0;
};

struct RoundReport {
  std::size_t round = 0;  // 1-based
  std::vector<std::size_t> participants;
  std::vector<ZoneRatios> client_ratios;  // aligned with participants
  ZoneRatios ratios;                      // mean over participants
  double accuracy = 0.0;
  BestEps privacy;
  double delta = 0.0;
  StageTimings timings;
};

// Everything a round produced, for harnesses and tests.
struct RoundTrace {
  std::size_t round = 0;
  std::vector<std::size_t> participants;
  LayeredParameters global_before;
  LayeredParameters global_after;
  std::vector<LayeredParameters> deltas;  // aligned with participants
  std::vector<SensitivityMask> local_masks;
  NegotiationResult negotiation;
  std::vector<ClientUpload> uploads;  // as stored at the aggregation server
  AggregateResult aggregate;
  FinalizeResult finalize;
};

// Validates the config and builds the train/test split it names.
struct DataSplit {
  LabeledDataset train;
  LabeledDataset test;
};
DataSplit LoadExperimentData(const ExperimentConfig& config);

class Simulation {
 public:
  using Observer = std::function<void(const RoundTrace&)>;
  using FisherSink = std::function<void(std::size_t round, std::size_t client,
                                        const FisherScores&)>;

  // Builds data, partitions, keys and the initial global model. Throws
  // ConfigError for an invalid config.
  explicit Simulation(const ExperimentConfig& config);

  RoundReport Step();
  // Runs the remaining rounds up to config.rounds.
  std::vector<RoundReport> Run();

  void set_observer(Observer observer) { observer_ = std::move(observer); }
  void set_fisher_sink(FisherSink sink) { fisher_sink_ = std::move(sink); }
  // Binary per-round record of masks and wire-form uploads.
  void set_message_log(std::ostream* out) { message_log_ = out; }

  const ExperimentConfig& config() const { return config_; }
  const Mlp& model() const { return model_; }
  const KeyServer& key_server() const { return *key_server_; }
  const AggregationServer& aggregation_server() const { return *agg_server_; }
  const std::vector<ClientState>& clients() const { return clients_; }
  const LabeledDataset& test_set() const { return test_; }
  const PrivacyLedger& ledger() const { return ledger_; }
  std::size_t rounds_done() const { return round_; }
  TrainOptions train_options() const;

 private:
  Simulation(const ExperimentConfig& config, DataSplit data);
  void LogRound(const RoundTrace& trace);

  ExperimentConfig config_;
  Mlp model_;
  LabeledDataset test_;
  std::unique_ptr<KeyServer> key_server_;
  std::unique_ptr<AggregationServer> agg_server_;
  std::vector<ClientState> clients_;
  PrivacyLedger ledger_;
  he::FixedPointCodec codec_;
  Rng select_rng_;
  std::size_t round_ = 0;
  Observer observer_;
  FisherSink fisher_sink_;
  std::ostream* message_log_ = nullptr;
};

std::vector<RoundReport> RunExperiment(const ExperimentConfig& config);


}  // namespace shieldfl

#endif  // SHIELDFL_PROTOCOL_H_
