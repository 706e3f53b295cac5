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

#include <gtest/gtest.h>

#include <cmath>

#include "shieldfl/errors.h"
#include "test_util.h"

namespace shieldfl::he {
namespace {

using shieldfl::testing::RandomVector;

const Paillier::KeyPair& TestKeys() {
  static const Paillier::KeyPair keys = [] {
    Rng rng(2024);
    return Paillier::KeyGen(512, rng);
  }();
  return keys;
}

TEST(CodecTest, Layout) {
  const FixedPointCodec c;
  EXPECT_EQ(c.slot_width(), 55u);
  EXPECT_EQ(c.bias(), std::uint64_t{1} << 46);
  EXPECT_EQ(c.max_summands(), 256u);
  EXPECT_EQ(SlotsPerChunk(511, c), 9u);
  EXPECT_EQ(SlotsPerChunk(2047, c), 37u);
  EXPECT_THROW((FixedPointCodec{30, 30, 8}.Validate()), ParameterError);
}

TEST(CodecTest, EncodeKnownValues) {
  const FixedPointCodec c;
  const std::vector<double> v = {0.0, 1.0, -1.0, 0.5};
  const auto s = Encode(v, c);
  EXPECT_EQ(s[0], c.bias());
  EXPECT_EQ(s[1], c.bias() + (std::uint64_t{1} << 30));
  EXPECT_EQ(s[2], c.bias() - (std::uint64_t{1} << 30));
  EXPECT_EQ(s[3], c.bias() + (std::uint64_t{1} << 29));
}

TEST(CodecTest, RoundTripWithinHalfUlp) {
  Rng rng(1);
  const FixedPointCodec c;
  const auto v = RandomVector(1000, -100.0, 100.0, rng);
  const auto back = Decode(Encode(v, c), c, 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_LE(std::abs(back[i] - v[i]), std::ldexp(1.0, -31));
  }
}

TEST(CodecTest, RangeErrorNamesIndex) {
  const FixedPointCodec c;
  const std::vector<double> v = {0.0, 65536.0};
  try {
    Encode(v, c);
    FAIL();
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos);
  }
  const std::vector<double> nan = {std::nan("")};
  EXPECT_THROW(Encode(nan, c), RangeError);
}

TEST(PackingTest, PackUnpackRoundTrip) {
  const std::vector<std::uint64_t> slots = {1, 0, (std::uint64_t{1} << 55) - 1,
                                            12345};
  const auto packed = PackSlots(slots, 55);
  EXPECT_EQ(UnpackSlots(packed, 4, 55), slots);
  mpz_class expected = 12345;
  expected <<= 55;
  expected += (mpz_class(1) << 55) - 1;
  expected <<= 110;
  expected += 1;
  EXPECT_EQ(packed, expected);
}

TEST(PackedCiphertextTest, SumDecryptsWithinTolerance) {
  const auto& keys = TestKeys();
  Rng rng(5);
  const FixedPointCodec codec;
  const std::size_t k = 6, n = 40;
  std::vector<double> sum(n, 0.0);
  PackedCiphertext acc;
  for (std::size_t i = 0; i < k; ++i) {
    const auto v = RandomVector(n, -8.0, 8.0, rng);
    for (std::size_t j = 0; j < n; ++j) sum[j] += v[j];
    const auto ct = EncryptVector<Paillier>(keys.pk, v, codec, rng);
    acc = i == 0 ? ct : AddCiphertexts<Paillier>(keys.pk, acc, ct);
  }
  EXPECT_EQ(acc.add_count, k - 1);
  EXPECT_EQ(acc.chunks.size(), 5u);
  const auto dec = DecryptVector<Paillier>(keys.sk, acc, k);
  for (std::size_t j = 0; j < n; ++j) {
    EXPECT_LE(std::abs(dec[j] - sum[j]), k * std::ldexp(1.0, -31));
  }
}

TEST(PackedCiphertextTest, NegativeExtremesSurviveSummation) {
  const auto& keys = TestKeys();
  Rng rng(6);
  const FixedPointCodec codec{30, 4, 3};
  const std::vector<double> lo(12, -15.999), hi(12, 15.999);
  PackedCiphertext acc = EncryptVector<Paillier>(keys.pk, lo, codec, rng);
  for (int i = 0; i < 7; ++i) {
    acc = AddCiphertexts<Paillier>(
        keys.pk, acc, EncryptVector<Paillier>(keys.pk, i % 2 ? hi : lo, codec,
                                              rng));
  }
  const auto dec = DecryptVector<Paillier>(keys.sk, acc, 8);
  for (double d : dec) EXPECT_NEAR(d, 5 * -15.999 + 3 * 15.999, 1e-8);
}

TEST(PackedCiphertextTest, GuardBitBudgetEnforced) {
  const auto& keys = TestKeys();
  Rng rng(7);
  const FixedPointCodec codec{30, 4, 2};
  const std::vector<double> v = {1.0, 2.0};
  auto acc = EncryptVector<Paillier>(keys.pk, v, codec, rng);
  for (int i = 0; i < 3; ++i) {
    acc = AddCiphertexts<Paillier>(keys.pk, acc,
                                   EncryptVector<Paillier>(keys.pk, v, codec, rng));
  }
  EXPECT_EQ(acc.summands(), 4u);
  EXPECT_THROW(AddCiphertexts<Paillier>(
                   keys.pk, acc, EncryptVector<Paillier>(keys.pk, v, codec, rng)),
               GuardBitError);
}

TEST(PackedCiphertextTest, DivisorMustMatchSummands) {
  const auto& keys = TestKeys();
  Rng rng(8);
  const std::vector<double> v = {1.0};
  const FixedPointCodec codec;
  const auto a = EncryptVector<Paillier>(keys.pk, v, codec, rng);
  const auto sum = AddCiphertexts<Paillier>(keys.pk, a, a);
  EXPECT_THROW(DecryptVector<Paillier>(keys.sk, sum, 1), ProtocolError);
  EXPECT_THROW(DecryptVector<Paillier>(keys.sk, sum, 3), ProtocolError);
  EXPECT_NEAR(DecryptVector<Paillier>(keys.sk, sum, 2)[0], 2.0, 1e-9);
}

TEST(PackedCiphertextTest, ShapeAndKeyMismatchRejected) {
  const auto& keys = TestKeys();
  Rng rng(9);
  const FixedPointCodec codec;
  const std::vector<double> one = {1.0}, two = {1.0, 2.0};
  const auto a = EncryptVector<Paillier>(keys.pk, one, codec, rng);
  const auto b = EncryptVector<Paillier>(keys.pk, two, codec, rng);
  EXPECT_THROW(AddCiphertexts<Paillier>(keys.pk, a, b), ProtocolError);
  Rng other_rng(10);
  const auto other = Paillier::KeyGen(512, other_rng);
  const auto c = EncryptVector<Paillier>(other.pk, one, codec, rng);
  EXPECT_THROW(AddCiphertexts<Paillier>(keys.pk, a, c), ProtocolError);
  EXPECT_THROW(DecryptVector<Paillier>(keys.sk, c, 1), ProtocolError);
}

TEST(PackedCiphertextTest, EmptyVector) {
  const auto& keys = TestKeys();
  Rng rng(11);
  const auto ct = EncryptVector<Paillier>(keys.pk, std::vector<double>{},
                                          FixedPointCodec{}, rng);
  EXPECT_TRUE(ct.chunks.empty());
  const auto sum = AddCiphertexts<Paillier>(keys.pk, ct, ct);
  EXPECT_TRUE(DecryptVector<Paillier>(keys.sk, sum, 2).empty());
}

TEST(PackedCiphertextTest, WireRoundTrip) {
  const auto& keys = TestKeys();
  Rng rng(12);
  const auto v = RandomVector(25, -3.0, 3.0, rng);
  auto ct = EncryptVector<Paillier>(keys.pk, v, FixedPointCodec{}, rng);
  ct = AddCiphertexts<Paillier>(keys.pk, ct, ct);
  const auto bytes = SerializeCiphertext(ct);
  EXPECT_EQ(bytes[0], 1);
  EXPECT_EQ(bytes[1], 30);
  const auto back = DeserializeCiphertext(bytes, keys.pk);
  EXPECT_EQ(back.chunks, ct.chunks);
  EXPECT_EQ(back.slot_count, ct.slot_count);
  EXPECT_EQ(back.add_count, ct.add_count);
  EXPECT_EQ(back.codec, ct.codec);
  EXPECT_EQ(back.key_id, ct.key_id);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(DeserializeCiphertext(truncated, keys.pk), ProtocolError);
}

}  // namespace
}  // namespace shieldfl::he
