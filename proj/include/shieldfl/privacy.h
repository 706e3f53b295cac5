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
#ifndef SHIELDFL_PRIVACY_H_
#define SHIELDFL_PRIVACY_H_

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "shieldfl/types.h"

namespace shieldfl {

enum class NoiseScaling {
  // Per-coordinate std C * sigma.
  kStandard,
  // Per-coordinate std C * sigma * sqrt(|K|), the variance written with the
  // participant-count factor.
  kPerParticipant,
};

inline constexpr double kNoPrivacy = std::numeric_limits<double>::infinity();

std::vector<double> DefaultAlphaGrid();

struct DpParams {
  double clip_norm = 1.0;
  double sigma = 1.0;
  NoiseScaling noise_scaling = NoiseScaling::kStandard;
  std::vector<double> alpha_grid = DefaultAlphaGrid();

  // Throws ParameterError on C <= 0, sigma < 0 or a bad grid.
  void Validate() const;
};

// v * min(1, C / ||v||_2); the zero vector is returned unchanged.
std::vector<double> ClipL2(std::span<const double> v, double clip_norm);

double NoiseStd(double clip_norm, double sigma, std::size_t participants,
                NoiseScaling mode);

// Adds N(0, NoiseStd(...)^2) to every coordinate. sigma = 0 is the identity
// and draws nothing from `rng`.
std::vector<double> GaussianNoise(std::span<const double> clipped,
                                  double clip_norm, double sigma,
                                  std::size_t participants, NoiseScaling mode,
                                  Rng& rng);

// Gaussian mechanism RDP at order alpha: alpha / (2 sigma^2). sigma = 0
// yields kNoPrivacy.
double RdpPerRound(double alpha, double sigma);

// eps + log((alpha-1)/alpha) - (log delta + log alpha) / (alpha - 1).
// Unclamped; may be negative for tiny eps.
double RdpToEpsDelta(double alpha, double eps_rdp, double delta);

struct BestEps {
  double eps = 0.0;      // clamped at 0
  double eps_raw = 0.0;  // as computed
  double alpha = 0.0;
  double eps_rdp = 0.0;  // accumulated RDP at alpha
};

// Per-order accumulated RDP over composed rounds.
class PrivacyLedger {
 public:
  explicit PrivacyLedger(std::vector<double> alpha_grid = DefaultAlphaGrid());

  // Adds one round with effective noise multiplier sigma_eff.
  void ComposeRound(double sigma_eff);
  // Adds an explicit per-order budget (aligned with the grid).
  void Compose(std::span<const double> per_round_eps);

  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& eps() const { return eps_; }
  std::size_t rounds() const { return rounds_; }

  // Minimum conversion over the grid; ties keep the smaller order.
  BestEps Best(double delta) const;

 private:
  std::vector<double> alphas_;
  std::vector<double> eps_;
  std::size_t rounds_ = 0;
};

}  // namespace shieldfl

#endif  // SHIELDFL_PRIVACY_H_
