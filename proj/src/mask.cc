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
#include "shieldfl/mask.h"

#include <algorithm>
#include <iterator>
#include <string>

#include "shieldfl/errors.h"

namespace shieldfl {

SensitivityMask::SensitivityMask(std::size_t universe,
                                 std::vector<std::uint32_t> indices)
    : universe_(universe), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()),
                 indices_.end());
  if (!indices_.empty() && indices_.back() >= universe_) {
    throw ShapeError("mask index " + std::to_string(indices_.back()) +
                     " outside universe " + std::to_string(universe_));
  }
}

SensitivityMask SensitivityMask::Full(std::size_t universe) {
  SensitivityMask m(universe);
  m.indices_.resize(universe);
  for (std::size_t i = 0; i < universe; ++i) {
    m.indices_[i] = static_cast<std::uint32_t>(i);
  }
  return m;
}

SensitivityMask SensitivityMask::FromIndicator(
    std::span<const std::uint8_t> flags) {
  SensitivityMask m(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] != 0) m.indices_.push_back(static_cast<std::uint32_t>(i));
  }
  return m;
}

bool SensitivityMask::Contains(std::uint32_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

double SensitivityMask::Ratio() const {
  return universe_ == 0 ? 0.0
                        : static_cast<double>(indices_.size()) /
                              static_cast<double>(universe_);
}

std::vector<std::uint8_t> SensitivityMask::Indicator() const {
  std::vector<std::uint8_t> flags(universe_, 0);
  for (auto i : indices_) flags[i] = 1;
  return flags;
}

void SensitivityMask::CheckUniverse(const SensitivityMask& other) const {
  if (universe_ != other.universe_) {
    throw ShapeError("mask universes differ: " + std::to_string(universe_) +
                     " vs " + std::to_string(other.universe_));
  }
}

SensitivityMask SensitivityMask::Union(const SensitivityMask& other) const {
  CheckUniverse(other);
  SensitivityMask m(universe_);
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(m.indices_));
  return m;
}

SensitivityMask SensitivityMask::Intersect(const SensitivityMask& other) const {
  CheckUniverse(other);
  SensitivityMask m(universe_);
  std::set_intersection(indices_.begin(), indices_.end(),
                        other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(m.indices_));
  return m;
}

SensitivityMask SensitivityMask::Minus(const SensitivityMask& other) const {
  CheckUniverse(other);
  SensitivityMask m(universe_);
  std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(),
                      other.indices_.end(), std::back_inserter(m.indices_));
  return m;
}

SensitivityMask SensitivityMask::Complement() const {
  return Full(universe_).Minus(*this);
}

bool SensitivityMask::IsSubsetOf(const SensitivityMask& other) const {
  CheckUniverse(other);
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

bool SensitivityMask::DisjointWith(const SensitivityMask& other) const {
  return Intersect(other).empty();
}

namespace {

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t GetU32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}

}  // namespace

std::vector<std::uint8_t> SensitivityMask::Serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * indices_.size());
  PutU32(out, static_cast<std::uint32_t>(indices_.size()));
  for (auto i : indices_) PutU32(out, i);
  return out;
}

SensitivityMask SensitivityMask::Deserialize(
    std::span<const std::uint8_t> bytes, std::size_t universe) {
  if (bytes.size() < 4) throw ProtocolError("mask wire form truncated");
  const std::uint32_t n = GetU32(bytes, 0);
  if (bytes.size() != 4 + 4 * static_cast<std::size_t>(n)) {
    throw ProtocolError("mask wire form length mismatch");
  }
  std::vector<std::uint32_t> idx(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    idx[k] = GetU32(bytes, 4 + 4 * static_cast<std::size_t>(k));
    if (k > 0 && idx[k] <= idx[k - 1]) {
      throw ProtocolError("mask wire form is not strictly ascending");
    }
  }
  return SensitivityMask(universe, std::move(idx));
}

}  // namespace shieldfl
