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
#ifndef SHIELDFL_ERRORS_H_
#define SHIELDFL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace shieldfl {

// Dimension mismatch between parameters, batches or masks.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A hyperparameter outside its legal range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A protocol precondition was violated (empty dataset, mismatched
// ciphertexts, divisor mismatch, ...).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A value does not fit the fixed-point codec.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Homomorphic sum would exceed the guard-bit budget of a packed slot.
class GuardBitError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Invalid experiment configuration; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace shieldfl

#endif  // SHIELDFL_ERRORS_H_
