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
#ifndef SHIELDFL_PAILLIER_H_
#define SHIELDFL_PAILLIER_H_

#include <gmpxx.h>

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "shieldfl/types.h"

namespace shieldfl::he {

// What the packing layer needs from an additively homomorphic scheme.
// Decryption is the only operation that takes a SecretKey.
template <typename S>
concept AdditiveHeScheme =
    requires(const typename S::PublicKey& pk, const typename S::SecretKey& sk,
             const typename S::Ciphertext& c,
             const typename S::Plaintext& m, Rng& rng) {
      { S::Encrypt(pk, m, rng) } -> std::same_as<typename S::Ciphertext>;
      { S::Add(pk, c, c) } -> std::same_as<typename S::Ciphertext>;
      { S::Decrypt(sk, c) } -> std::same_as<typename S::Plaintext>;
      { S::PlaintextBits(pk) } -> std::convertible_to<std::size_t>;
      { S::KeyId(pk) } -> std::convertible_to<std::uint64_t>;
    };

// base^e mod m for a fixed base, from precomputed powers
// base^(d * 2^(window * i)) for every digit d of every window i.
class FixedBasePow {
 public:
  FixedBasePow(const mpz_class& base, const mpz_class& modulus,
               std::size_t exponent_bits, unsigned window = 8);
  // Requires 0 <= e < 2^exponent_bits.
  mpz_class Pow(const mpz_class& e) const;
  std::size_t exponent_bits() const { return exponent_bits_; }

 private:
  mpz_class modulus_;
  std::size_t exponent_bits_;
  unsigned window_;
  std::vector<mpz_class> table_;  // window i, digit d at i * (2^w - 1) + d - 1
};

// Paillier with generator g = n + 1. Keys from KeyGen also carry
// h = -x^2 mod n and the fixed-base table of h_s = h^n mod n^2, so Encrypt
// can use h_s^a with a short exponent a in place of r^n (the
// Damgard-Jurik-Nielsen randomizer). Textbook keys from FromPrimes encrypt
// with a full r^n.
struct Paillier {
  using Plaintext = mpz_class;
  using Ciphertext = mpz_class;

  struct PublicKey {
    mpz_class n;
    mpz_class n_squared;
    std::size_t modulus_bits = 0;
    mpz_class h;  // 0 for textbook keys
    std::shared_ptr<const FixedBasePow> h_s;
  };

  struct SecretKey {
    PublicKey pk;
    mpz_class lambda;  // lcm(p - 1, q - 1)
    mpz_class mu;      // lambda^{-1} mod n
  };

  struct KeyPair {
    PublicKey pk;
    SecretKey sk;
  };

  static constexpr std::size_t kMinModulusBits = 512;

  // Deterministic given `rng`. Throws ParameterError for modulus_bits below
  // kMinModulusBits or odd.
  static KeyPair KeyGen(std::size_t modulus_bits, Rng& rng);
  // Textbook construction from explicit primes (tiny fixtures only).
  static KeyPair FromPrimes(const mpz_class& p, const mpz_class& q);

  // Requires 0 <= m < n; throws RangeError otherwise.
  static Ciphertext Encrypt(const PublicKey& pk, const Plaintext& m, Rng& rng);
  // Encryption with caller-chosen randomness r, gcd(r, n) = 1.
  static Ciphertext EncryptWith(const PublicKey& pk, const Plaintext& m,
                                const mpz_class& r);
  // (1 + n)^m * h_s^a mod n^2, equal to EncryptWith(pk, m, h^a mod n).
  // Requires a key from KeyGen and 0 <= a < 2^(modulus_bits / 2).
  static Ciphertext EncryptWithExponent(const PublicKey& pk,
                                        const Plaintext& m, const mpz_class& a);
  static Ciphertext Add(const PublicKey& pk, const Ciphertext& a,
                        const Ciphertext& b);
  static Plaintext Decrypt(const SecretKey& sk, const Ciphertext& c);

  // Largest b such that every b-bit integer is a valid plaintext.
  static std::size_t PlaintextBits(const PublicKey& pk) {
    return pk.modulus_bits - 1;
  }
  // Low 64 bits of n; enough to catch ciphertexts from different keys.
  static std::uint64_t KeyId(const PublicKey& pk);
};

static_assert(AdditiveHeScheme<Paillier>);

// Uniform integer in [0, bound) drawn from `rng`.
mpz_class RandomBelow(const mpz_class& bound, Rng& rng);

}  // namespace shieldfl::he

#endif  // SHIELDFL_PAILLIER_H_
