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
#ifndef SHIELDFL_PACKING_H_
#define SHIELDFL_PACKING_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shieldfl/errors.h"
#include "shieldfl/paillier.h"
#include "shieldfl/types.h"

namespace shieldfl::he {

// Fixed-point slot layout. A slot holds round(v * 2^frac_bits) offset by
// bias = 2^(int_bits + frac_bits), so a single encoded value lies in
// [0, 2^(int_bits + frac_bits + 1)). The guard_bits headroom lets up to
// 2^guard_bits encodings be summed without carrying into the next slot.
struct FixedPointCodec {
  unsigned frac_bits = 30;
  unsigned int_bits = 16;
  unsigned guard_bits = 8;

  unsigned slot_width() const { return int_bits + frac_bits + guard_bits + 1; }
  std::uint64_t bias() const { return std::uint64_t{1} << (int_bits + frac_bits); }
  std::uint64_t max_summands() const { return std::uint64_t{1} << guard_bits; }
  // Throws ParameterError unless the layout fits a 63-bit slot.
  void Validate() const;

  bool operator==(const FixedPointCodec&) const = default;
};

// Offset-binary slots. Throws RangeError naming the first index with
// |value| >= 2^int_bits (or a non-finite value).
std::vector<std::uint64_t> Encode(std::span<const double> values,
                                  const FixedPointCodec& codec);
// Inverse of a sum of `divisor` encodings: removes divisor * bias and scales.
std::vector<double> Decode(std::span<const std::uint64_t> slots,
                           const FixedPointCodec& codec, std::uint64_t divisor);

// Number of slots that fit below 2^plaintext_bits.
std::size_t SlotsPerChunk(std::size_t plaintext_bits,
                          const FixedPointCodec& codec);

mpz_class PackSlots(std::span<const std::uint64_t> slots, unsigned slot_width);
std::vector<std::uint64_t> UnpackSlots(const mpz_class& packed,
                                       std::size_t count, unsigned slot_width);

template <AdditiveHeScheme S>
struct BasicPackedCiphertext {
  std::vector<typename S::Ciphertext> chunks;
  std::size_t slot_count = 0;
  FixedPointCodec codec;
  // Number of homomorphic additions folded in; the ciphertext encrypts the
  // sum of add_count + 1 encodings.
  std::uint32_t add_count = 0;
  std::uint64_t key_id = 0;

  std::uint64_t summands() const { return std::uint64_t{add_count} + 1; }
};

template <AdditiveHeScheme S>
BasicPackedCiphertext<S> EncryptVector(const typename S::PublicKey& pk,
                                       std::span<const double> values,
                                       const FixedPointCodec& codec, Rng& rng) {
  codec.Validate();
  BasicPackedCiphertext<S> ct;
  ct.codec = codec;
  ct.slot_count = values.size();
  ct.key_id = S::KeyId(pk);
  const auto slots = Encode(values, codec);
  const std::size_t per_chunk = SlotsPerChunk(S::PlaintextBits(pk), codec);
  if (per_chunk == 0 && !slots.empty()) {
    throw ParameterError("key too small to hold a single slot");
  }
  for (std::size_t start = 0; start < slots.size(); start += per_chunk) {
    const std::size_t n = std::min(per_chunk, slots.size() - start);
    ct.chunks.push_back(S::Encrypt(
        pk, PackSlots(std::span(slots).subspan(start, n), codec.slot_width()),
        rng));
  }
  return ct;
}

template <AdditiveHeScheme S>
BasicPackedCiphertext<S> AddCiphertexts(const typename S::PublicKey& pk,
                                        const BasicPackedCiphertext<S>& a,
                                        const BasicPackedCiphertext<S>& b) {
  if (a.key_id != b.key_id || a.key_id != S::KeyId(pk)) {
    throw ProtocolError("ciphertexts were produced under different keys");
  }
  if (!(a.codec == b.codec) || a.slot_count != b.slot_count ||
      a.chunks.size() != b.chunks.size()) {
    throw ProtocolError("ciphertext shapes differ: " +
                        std::to_string(a.slot_count) + " vs " +
                        std::to_string(b.slot_count) + " slots");
  }
  if (a.summands() + b.summands() > a.codec.max_summands()) {
    throw GuardBitError("summing " +
                        std::to_string(a.summands() + b.summands()) +
                        " encodings exceeds the 2^" +
                        std::to_string(a.codec.guard_bits) +
                        " guard-bit capacity");
  }
  BasicPackedCiphertext<S> out;
  out.codec = a.codec;
  out.slot_count = a.slot_count;
  out.key_id = a.key_id;
  out.add_count = a.add_count + b.add_count + 1;
  out.chunks.reserve(a.chunks.size());
  for (std::size_t i = 0; i < a.chunks.size(); ++i) {
    out.chunks.push_back(S::Add(pk, a.chunks[i], b.chunks[i]));
  }
  return out;
}

// Decodes the sum of all folded encodings. `divisor` must equal the number
// of summands (add_count + 1); anything else would silently mis-remove the
// offset bias, so it is rejected with ProtocolError.
template <AdditiveHeScheme S>
std::vector<double> DecryptVector(const typename S::SecretKey& sk,
                                  const BasicPackedCiphertext<S>& ct,
                                  std::uint64_t divisor) {
  if (divisor != ct.summands()) {
    throw ProtocolError("decrypt divisor " + std::to_string(divisor) +
                        " != number of summed ciphertexts " +
                        std::to_string(ct.summands()));
  }
  if (ct.key_id != S::KeyId(sk.pk)) {
    throw ProtocolError("ciphertext was produced under a different key");
  }
  const std::size_t per_chunk = SlotsPerChunk(S::PlaintextBits(sk.pk), ct.codec);
  std::vector<std::uint64_t> slots;
  slots.reserve(ct.slot_count);
  for (std::size_t i = 0; i < ct.chunks.size(); ++i) {
    const std::size_t n = std::min(per_chunk, ct.slot_count - i * per_chunk);
    const auto part =
        UnpackSlots(S::Decrypt(sk, ct.chunks[i]), n, ct.codec.slot_width());
    slots.insert(slots.end(), part.begin(), part.end());
  }
  return Decode(slots, ct.codec, divisor);
}

using PackedCiphertext = BasicPackedCiphertext<Paillier>;
using PublicKey = Paillier::PublicKey;
using SecretKey = Paillier::SecretKey;

// Wire form: 16-byte header (version, frac_bits, int_bits, guard_bits as
// bytes; slot_count, add_count, chunk_count as big-endian u32) followed by
// each chunk as a big-endian u32 byte length and big-endian magnitude bytes.
std::vector<std::uint8_t> SerializeCiphertext(const PackedCiphertext& ct);
PackedCiphertext DeserializeCiphertext(std::span<const std::uint8_t> bytes,
                                       const PublicKey& pk);

}  // namespace shieldfl::he

#endif  // SHIELDFL_PACKING_H_
