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
#ifndef SHIELDFL_MASK_H_
#define SHIELDFL_MASK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shieldfl {

// A set of parameter indices over a universe of `universe()` parameters.
// Indices are kept sorted and unique.
class SensitivityMask {
 public:
  SensitivityMask() = default;
  explicit SensitivityMask(std::size_t universe) : universe_(universe) {}
  // Sorts and deduplicates; throws ShapeError on an index >= universe.
  SensitivityMask(std::size_t universe, std::vector<std::uint32_t> indices);

  static SensitivityMask Full(std::size_t universe);
  // Indices i with flags[i] != 0.
  static SensitivityMask FromIndicator(std::span<const std::uint8_t> flags);

  std::size_t universe() const { return universe_; }
  const std::vector<std::uint32_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool Contains(std::uint32_t index) const;
  double Ratio() const;

  // 0/1 indicator vector of length universe().
  std::vector<std::uint8_t> Indicator() const;

  // Set algebra. Operands must share a universe (ShapeError otherwise).
  SensitivityMask Union(const SensitivityMask& other) const;
  SensitivityMask Intersect(const SensitivityMask& other) const;
  SensitivityMask Minus(const SensitivityMask& other) const;
  SensitivityMask Complement() const;
  bool IsSubsetOf(const SensitivityMask& other) const;
  bool DisjointWith(const SensitivityMask& other) const;

  // Wire form: u32 count followed by the sorted indices, all little-endian.
  std::vector<std::uint8_t> Serialize() const;
  static SensitivityMask Deserialize(std::span<const std::uint8_t> bytes,
                                     std::size_t universe);

  bool operator==(const SensitivityMask&) const = default;

 private:
  void CheckUniverse(const SensitivityMask& other) const;

  std::size_t universe_ = 0;
  std::vector<std::uint32_t> indices_;
};

}  // namespace shieldfl

#endif  // SHIELDFL_MASK_H_
