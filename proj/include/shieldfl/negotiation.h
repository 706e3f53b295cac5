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
#ifndef SHIELDFL_NEGOTIATION_H_
#define SHIELDFL_NEGOTIATION_H_

#include <cstddef>
#include <vector>

#include "shieldfl/mask.h"

namespace shieldfl {

// One client's view of the three-way split of the parameter set.
struct ZonePartition {
  SensitivityMask enc;    // shared by every participant
  SensitivityMask pers;   // kept local, never uploaded
  SensitivityMask noise;  // clipped and noised, uploaded in the clear
  std::size_t universe = 0;

  double enc_ratio() const { return enc.Ratio(); }
  double pers_ratio() const { return pers.Ratio(); }
  double noise_ratio() const { return noise.Ratio(); }
};

// Smallest vote count v with v / n_voters >= rho. Products rho * n that lie
// within 1e-9 of an integer are snapped to it, so decimal rho values such as
// 0.7 behave as their exact rational reading.
std::size_t ConsensusVotesNeeded(double rho, std::size_t n_voters);

// j is kept iff at least a rho fraction of the masks contain j. rho = 1 is the
// intersection and rho = 1/|masks| the union.
SensitivityMask ConsensusMask(const std::vector<SensitivityMask>& local_masks,
                              double rho);

// local \ enc.
SensitivityMask PersonalizedMask(const SensitivityMask& local,
                                 const SensitivityMask& enc);

// universe \ (enc U pers).
SensitivityMask NoiseMask(std::size_t universe, const SensitivityMask& enc,
                          const SensitivityMask& pers);

struct NegotiationResult {
  SensitivityMask enc;
  std::vector<ZonePartition> zones;  // aligned with the input masks
};

// Server-mediated exchange: clients send local masks, the server broadcasts
// the consensus, each client derives its personalized and noise zones.
NegotiationResult Negotiate(const std::vector<SensitivityMask>& local_masks,
                            double rho);

}  // namespace shieldfl

#endif  // SHIELDFL_NEGOTIATION_H_
