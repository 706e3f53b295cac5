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
#include "shieldfl/negotiation.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "shieldfl/errors.h"

namespace shieldfl {

std::size_t ConsensusVotesNeeded(double rho, std::size_t n_voters) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ParameterError("consensus threshold rho must be in (0, 1], got " +
                         std::to_string(rho));
  }
  const double target = rho * static_cast<double>(n_voters);
  const double nearest = std::round(target);
  if (std::fabs(target - nearest) <= 1e-9 * std::max(1.0, target)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(target));
}

SensitivityMask ConsensusMask(const std::vector<SensitivityMask>& local_masks,
                              double rho) {
  if (local_masks.empty()) {
    throw ProtocolError("consensus needs at least one local mask");
  }
  const std::size_t needed = ConsensusVotesNeeded(rho, local_masks.size());
  const std::size_t universe = local_masks.front().universe();
  std::vector<std::uint32_t> votes(universe, 0);
  for (const auto& m : local_masks) {
    if (m.universe() != universe) {
      throw ProtocolError("local masks disagree on the parameter universe");
    }
    for (auto j : m.indices()) ++votes[j];
  }
  std::vector<std::uint32_t> idx;
  for (std::size_t j = 0; j < universe; ++j) {
    if (votes[j] >= needed && votes[j] > 0) {
      idx.push_back(static_cast<std::uint32_t>(j));
    }
  }
  return SensitivityMask(universe, std::move(idx));
}

SensitivityMask PersonalizedMask(const SensitivityMask& local,
                                 const SensitivityMask& enc) {
  return local.Minus(enc);
}

SensitivityMask NoiseMask(std::size_t universe, const SensitivityMask& enc,
                          const SensitivityMask& pers) {
  if (enc.universe() != universe || pers.universe() != universe) {
    throw ShapeError("zone masks disagree on the parameter universe");
  }
  return enc.Union(pers).Complement();
}

NegotiationResult Negotiate(const std::vector<SensitivityMask>& local_masks,
                            double rho) {
  NegotiationResult r;
  r.enc = ConsensusMask(local_masks, rho);
  const std::size_t universe = r.enc.universe();
  r.zones.reserve(local_masks.size());
  for (const auto& local : local_masks) {
    ZonePartition z;
    z.universe = universe;
    z.enc = r.enc;
    z.pers = PersonalizedMask(local, r.enc);
    z.noise = NoiseMask(universe, z.enc, z.pers);
    r.zones.push_back(std::move(z));
  }
  return r;
}

}  // namespace shieldfl
