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
#include "shieldfl/paillier.h"

#include <string>
#include <vector>

#include "shieldfl/errors.h"

namespace shieldfl::he {

mpz_class RandomBelow(const mpz_class& bound, Rng& rng) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2) + 64;
  std::vector<std::uint64_t> words((bits + 63) / 64);
  for (auto& w : words) w = rng();
  mpz_class x;
  mpz_import(x.get_mpz_t(), words.size(), -1, sizeof(std::uint64_t), 0, 0,
             words.data());
  // The extra 64 bits keep the modulo bias below 2^-64.
  mpz_mod(x.get_mpz_t(), x.get_mpz_t(), bound.get_mpz_t());
  return x;
}

FixedBasePow::FixedBasePow(const mpz_class& base, const mpz_class& modulus,
                           std::size_t exponent_bits, unsigned window)
    : modulus_(modulus), exponent_bits_(exponent_bits), window_(window) {
  if (window == 0 || window > 16) throw ParameterError("window must be 1..16");
  const std::size_t digits = (std::size_t{1} << window) - 1;
  const std::size_t windows = (exponent_bits + window - 1) / window;
  table_.reserve(windows * digits);
  mpz_class b = base % modulus;
  for (std::size_t i = 0; i < windows; ++i) {
    mpz_class acc = b;
    table_.push_back(acc);
    for (std::size_t d = 2; d <= digits; ++d) {
      acc *= b;
      mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), modulus_.get_mpz_t());
      table_.push_back(acc);
    }
    // b^(2^w) = b^(2^w - 1) * b
    b = acc * b;
    mpz_mod(b.get_mpz_t(), b.get_mpz_t(), modulus_.get_mpz_t());
  }
}

mpz_class FixedBasePow::Pow(const mpz_class& e) const {
  if (e < 0 || mpz_sizeinbase(e.get_mpz_t(), 2) > exponent_bits_) {
    throw RangeError("fixed-base exponent out of range");
  }
  const std::size_t digits = (std::size_t{1} << window_) - 1;
  const std::size_t windows = table_.size() / digits;
  mpz_class r = 1;
  for (std::size_t i = 0; i < windows; ++i) {
    std::size_t d = 0;
    for (unsigned k = 0; k < window_; ++k) {
      d |= static_cast<std::size_t>(mpz_tstbit(e.get_mpz_t(), i * window_ + k))
           << k;
    }
    if (d == 0) continue;
    r *= table_[i * digits + d - 1];
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), modulus_.get_mpz_t());
  }
  return r;
}

namespace {

mpz_class RandomPrime(std::size_t bits, Rng& rng) {
  while (true) {
    mpz_class base = 1;
    base <<= bits;  // 2^bits
    mpz_class x = RandomBelow(base, rng);
    // Top two bits set: the product of two such primes has exactly 2*bits bits.
    mpz_setbit(x.get_mpz_t(), bits - 1);
    mpz_setbit(x.get_mpz_t(), bits - 2);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
    if (mpz_sizeinbase(p.get_mpz_t(), 2) == bits) return p;
  }
}

}  // namespace

Paillier::KeyPair Paillier::FromPrimes(const mpz_class& p, const mpz_class& q) {
  if (p == q) throw ParameterError("Paillier primes must differ");
  KeyPair kp;
  kp.pk.n = p * q;
  kp.pk.n_squared = kp.pk.n * kp.pk.n;
  kp.pk.modulus_bits = mpz_sizeinbase(kp.pk.n.get_mpz_t(), 2);
  const mpz_class pm1 = p - 1, qm1 = q - 1;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), kp.pk.n.get_mpz_t(), mpz_class(pm1 * qm1).get_mpz_t());
  if (g != 1) throw ParameterError("gcd(n, (p-1)(q-1)) must be 1");
  kp.sk.pk = kp.pk;
  mpz_lcm(kp.sk.lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
  // With g = n + 1, L(g^lambda mod n^2) = lambda mod n.
  if (mpz_invert(kp.sk.mu.get_mpz_t(), kp.sk.lambda.get_mpz_t(),
                 kp.pk.n.get_mpz_t()) == 0) {
    throw ParameterError("lambda is not invertible mod n");
  }
  return kp;
}

Paillier::KeyPair Paillier::KeyGen(std::size_t modulus_bits, Rng& rng) {
  if (modulus_bits < kMinModulusBits || modulus_bits % 2 != 0) {
    throw ParameterError("modulus_bits must be even and >= " +
                         std::to_string(kMinModulusBits));
  }
  while (true) {
    const mpz_class p = RandomPrime(modulus_bits / 2, rng);
    const mpz_class q = RandomPrime(modulus_bits / 2, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(),
            mpz_class((p - 1) * (q - 1)).get_mpz_t());
    if (g != 1 || mpz_sizeinbase(n.get_mpz_t(), 2) != modulus_bits) continue;
    KeyPair kp = FromPrimes(p, q);
    mpz_class x;
    do {
      x = RandomBelow(n, rng);
      mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), n.get_mpz_t());
    } while (x == 0 || g != 1);
    kp.pk.h = n - x * x % n;
    mpz_class h_s;
    mpz_powm(h_s.get_mpz_t(), kp.pk.h.get_mpz_t(), n.get_mpz_t(),
             kp.pk.n_squared.get_mpz_t());
    kp.pk.h_s = std::make_shared<const FixedBasePow>(h_s, kp.pk.n_squared,
                                                     modulus_bits / 2);
    kp.sk.pk = kp.pk;
    return kp;
  }
}

Paillier::Ciphertext Paillier::EncryptWith(const PublicKey& pk,
                                           const Plaintext& m,
                                           const mpz_class& r) {
  if (m < 0 || m >= pk.n) throw RangeError("Paillier plaintext outside [0, n)");
  // (1 + n)^m = 1 + m n  (mod n^2)
  mpz_class gm = m * pk.n + 1;
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  mpz_class c = gm * rn;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return c;
}

Paillier::Ciphertext Paillier::EncryptWithExponent(const PublicKey& pk,
                                                   const Plaintext& m,
                                                   const mpz_class& a) {
  if (!pk.h_s) throw ParameterError("key has no short-exponent base");
  if (m < 0 || m >= pk.n) throw RangeError("Paillier plaintext outside [0, n)");
  mpz_class c = (m * pk.n + 1) * pk.h_s->Pow(a);
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return c;
}

Paillier::Ciphertext Paillier::Encrypt(const PublicKey& pk, const Plaintext& m,
                                       Rng& rng) {
  if (pk.h_s) {
    mpz_class bound = 1;
    bound <<= pk.h_s->exponent_bits();
    return EncryptWithExponent(pk, m, RandomBelow(bound, rng));
  }
  mpz_class r, g;
  do {
    r = RandomBelow(pk.n, rng);
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
  } while (r == 0 || g != 1);
  return EncryptWith(pk, m, r);
}

Paillier::Ciphertext Paillier::Add(const PublicKey& pk, const Ciphertext& a,
                                   const Ciphertext& b) {
  mpz_class c = a * b;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return c;
}

Paillier::Plaintext Paillier::Decrypt(const SecretKey& sk,
                                      const Ciphertext& c) {
  const auto& pk = sk.pk;
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.get_mpz_t(), sk.lambda.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  mpz_class l = (u - 1) / pk.n;
  mpz_class m = l * sk.mu;
  mpz_mod(m.get_mpz_t(), m.get_mpz_t(), pk.n.get_mpz_t());
  return m;
}

std::uint64_t Paillier::KeyId(const PublicKey& pk) {
  std::uint64_t id = 0;
  std::size_t count = 0;
  std::uint64_t words[1] = {0};
  mpz_class low = pk.n;
  mpz_fdiv_r_2exp(low.get_mpz_t(), low.get_mpz_t(), 64);
  mpz_export(words, &count, -1, sizeof(std::uint64_t), 0, 0, low.get_mpz_t());
  if (count > 0) id = words[0];
  return id;
}

}  // namespace shieldfl::he
