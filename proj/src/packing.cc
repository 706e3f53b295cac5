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
#include "shieldfl/packing.h"

#include <cmath>

namespace shieldfl::he {

void FixedPointCodec::Validate() const {
  if (frac_bits == 0 || int_bits == 0) {
    throw ParameterError("codec needs frac_bits >= 1 and int_bits >= 1");
  }
  if (slot_width() > 63) {
    throw ParameterError("codec slot width " + std::to_string(slot_width()) +
                         " exceeds 63 bits");
  }
}

std::vector<std::uint64_t> Encode(std::span<const double> values,
                                  const FixedPointCodec& codec) {
  codec.Validate();
  const double limit = std::ldexp(1.0, static_cast<int>(codec.int_bits));
  const std::int64_t bias = static_cast<std::int64_t>(codec.bias());
  std::vector<std::uint64_t> slots(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || std::fabs(v) >= limit) {
      throw RangeError("value " + std::to_string(v) + " at index " +
                       std::to_string(i) + " outside codec range (-2^" +
                       std::to_string(codec.int_bits) + ", 2^" +
                       std::to_string(codec.int_bits) + ")");
    }
    const std::int64_t q =
        std::llround(std::ldexp(v, static_cast<int>(codec.frac_bits)));
    if (q >= bias || q <= -bias) {
      throw RangeError("value at index " + std::to_string(i) +
                       " rounds outside the codec range");
    }
    slots[i] = static_cast<std::uint64_t>(q + bias);
  }
  return slots;
}

std::vector<double> Decode(std::span<const std::uint64_t> slots,
                           const FixedPointCodec& codec,
                           std::uint64_t divisor) {
  codec.Validate();
  const std::int64_t offset =
      static_cast<std::int64_t>(divisor * codec.bias());
  std::vector<double> out(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::int64_t q = static_cast<std::int64_t>(slots[i]) - offset;
    out[i] = static_cast<double>(std::ldexp(
        static_cast<long double>(q), -static_cast<int>(codec.frac_bits)));
  }
  return out;
}

std::size_t SlotsPerChunk(std::size_t plaintext_bits,
                          const FixedPointCodec& codec) {
  return plaintext_bits / codec.slot_width();
}

mpz_class PackSlots(std::span<const std::uint64_t> slots, unsigned slot_width) {
  mpz_class packed = 0;
  // Slot 0 occupies the least significant bits.
  for (std::size_t k = slots.size(); k-- > 0;) {
    packed <<= slot_width;
    mpz_class s;
    mpz_import(s.get_mpz_t(), 1, -1, sizeof(std::uint64_t), 0, 0, &slots[k]);
    packed += s;
  }
  return packed;
}

std::vector<std::uint64_t> UnpackSlots(const mpz_class& packed,
                                       std::size_t count, unsigned slot_width) {
  std::vector<std::uint64_t> out(count);
  mpz_class rest = packed, low;
  for (std::size_t k = 0; k < count; ++k) {
    mpz_fdiv_r_2exp(low.get_mpz_t(), rest.get_mpz_t(), slot_width);
    std::uint64_t word = 0;
    std::size_t n = 0;
    mpz_export(&word, &n, -1, sizeof(std::uint64_t), 0, 0, low.get_mpz_t());
    out[k] = n == 0 ? 0 : word;
    mpz_fdiv_q_2exp(rest.get_mpz_t(), rest.get_mpz_t(), slot_width);
  }
  return out;
}

namespace {

constexpr std::uint8_t kWireVersion = 1;

void PutBe32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 3; b >= 0; --b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t GetBe32(std::span<const std::uint8_t> in, std::size_t at) {
  if (at + 4 > in.size()) throw ProtocolError("ciphertext wire form truncated");
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v = (v << 8) | in[at + b];
  return v;
}

}  // namespace

std::vector<std::uint8_t> SerializeCiphertext(const PackedCiphertext& ct) {
  std::vector<std::uint8_t> out;
  out.push_back(kWireVersion);
  out.push_back(static_cast<std::uint8_t>(ct.codec.frac_bits));
  out.push_back(static_cast<std::uint8_t>(ct.codec.int_bits));
  out.push_back(static_cast<std::uint8_t>(ct.codec.guard_bits));
  PutBe32(out, static_cast<std::uint32_t>(ct.slot_count));
  PutBe32(out, ct.add_count);
  PutBe32(out, static_cast<std::uint32_t>(ct.chunks.size()));
  for (const auto& c : ct.chunks) {
    std::size_t n = 0;
    std::vector<std::uint8_t> bytes((mpz_sizeinbase(c.get_mpz_t(), 2) + 7) / 8);
    mpz_export(bytes.data(), &n, 1, 1, 1, 0, c.get_mpz_t());
    bytes.resize(n);
    PutBe32(out, static_cast<std::uint32_t>(n));
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

PackedCiphertext DeserializeCiphertext(std::span<const std::uint8_t> bytes,
                                       const PublicKey& pk) {
  if (bytes.size() < 16) throw ProtocolError("ciphertext wire form truncated");
  if (bytes[0] != kWireVersion) {
    throw ProtocolError("unsupported ciphertext wire version " +
                        std::to_string(bytes[0]));
  }
  PackedCiphertext ct;
  ct.codec.frac_bits = bytes[1];
  ct.codec.int_bits = bytes[2];
  ct.codec.guard_bits = bytes[3];
  ct.slot_count = GetBe32(bytes, 4);
  ct.add_count = GetBe32(bytes, 8);
  const std::uint32_t chunks = GetBe32(bytes, 12);
  ct.key_id = Paillier::KeyId(pk);
  std::size_t at = 16;
  for (std::uint32_t i = 0; i < chunks; ++i) {
    const std::uint32_t n = GetBe32(bytes, at);
    at += 4;
    if (at + n > bytes.size()) throw ProtocolError("ciphertext chunk truncated");
    mpz_class c;
    mpz_import(c.get_mpz_t(), n, 1, 1, 1, 0, bytes.data() + at);
    at += n;
    ct.chunks.push_back(std::move(c));
  }
  if (at != bytes.size()) throw ProtocolError("trailing bytes after ciphertext");
  return ct;
}

}  // namespace shieldfl::he
