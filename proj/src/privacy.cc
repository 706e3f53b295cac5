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
#include "shieldfl/privacy.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "shieldfl/errors.h"

namespace shieldfl {

std::vector<double> DefaultAlphaGrid() {
  return {1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0, 32.0, 64.0};
}

namespace {

void ValidateGrid(const std::vector<double>& grid) {
  if (grid.empty()) throw ParameterError("alpha grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 1.0) || !std::isfinite(grid[i])) {
      throw ParameterError("alpha grid entries must be finite and > 1");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ParameterError("alpha grid must be strictly ascending");
    }
  }
}

}  // namespace

void DpParams::Validate() const {
  if (!(clip_norm > 0.0)) throw ParameterError("clip norm must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("sigma must be finite and >= 0");
  }
  ValidateGrid(alpha_grid);
}

std::vector<double> ClipL2(std::span<const double> v, double clip_norm) {
  if (!(clip_norm > 0.0)) throw ParameterError("clip norm must be > 0");
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  const double factor = norm > 0.0 ? std::min(1.0, clip_norm / norm) : 1.0;
  std::vector<double> out(v.begin(), v.end());
  if (factor < 1.0) {
    for (double& x : out) x *= factor;
  }
  return out;
}

double NoiseStd(double clip_norm, double sigma, std::size_t participants,
                NoiseScaling mode) {
  const double base = clip_norm * sigma;
  return mode == NoiseScaling::kPerParticipant
             ? base * std::sqrt(static_cast<double>(participants))
             : base;
}

std::vector<double> GaussianNoise(std::span<const double> clipped,
                                  double clip_norm, double sigma,
                                  std::size_t participants, NoiseScaling mode,
                                  Rng& rng) {
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  std::vector<double> out(clipped.begin(), clipped.end());
  if (sigma == 0.0) return out;
  std::normal_distribution<double> z(
      0.0, NoiseStd(clip_norm, sigma, participants, mode));
  for (double& x : out) x += z(rng);
  return out;
}

double RdpPerRound(double alpha, double sigma) {
  if (!(alpha > 1.0)) throw ParameterError("RDP order must be > 1");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  if (sigma == 0.0) return kNoPrivacy;
  return alpha / (2.0 * sigma * sigma);
}

double RdpToEpsDelta(double alpha, double eps_rdp, double delta) {
  if (!(alpha > 1.0)) throw ParameterError("RDP order must be > 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("delta must lie in (0, 1)");
  }
  if (!(eps_rdp >= 0.0)) throw ParameterError("RDP budget must be >= 0");
  if (std::isinf(eps_rdp)) return kNoPrivacy;
  return eps_rdp + std::log((alpha - 1.0) / alpha) -
         (std::log(delta) + std::log(alpha)) / (alpha - 1.0);
}

PrivacyLedger::PrivacyLedger(std::vector<double> alpha_grid)
    : alphas_(std::move(alpha_grid)) {
  ValidateGrid(alphas_);
  eps_.assign(alphas_.size(), 0.0);
}

void PrivacyLedger::ComposeRound(double sigma_eff) {
  std::vector<double> per(alphas_.size());
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    per[i] = RdpPerRound(alphas_[i], sigma_eff);
  }
  Compose(per);
}

void PrivacyLedger::Compose(std::span<const double> per_round_eps) {
  if (per_round_eps.size() != alphas_.size()) {
    throw ShapeError("per-round budget does not match the alpha grid");
  }
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (!(per_round_eps[i] >= 0.0)) {
      throw ParameterError("per-round RDP budget must be >= 0");
    }
    eps_[i] += per_round_eps[i];
  }
  ++rounds_;
}

BestEps PrivacyLedger::Best(double delta) const {
  BestEps best;
  best.eps_raw = kNoPrivacy;
  best.alpha = alphas_.front();
  best.eps_rdp = eps_.front();
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    const double e = RdpToEpsDelta(alphas_[i], eps_[i], delta);
    if (e < best.eps_raw) {
      best.eps_raw = e;
      best.alpha = alphas_[i];
      best.eps_rdp = eps_[i];
    }
  }
  best.eps = std::max(best.eps_raw, 0.0);
  return best;
}

}  // namespace shieldfl
