// Copyright 2026 The SFM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFM_TYPES_H_
#define SFM_TYPES_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sfm {

// Ground-set elements are 0-based internally. Files and CLI output use the
// 1-based numbering of the universe {1, ..., n}.
using Element = std::int32_t;

using Rng = std::mt19937_64;

// A precondition on a numeric argument does not hold (rank out of range,
// point outside the domain, mixed-sign edit, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The function observed at runtime breaks a promise the caller made about it
// (non-integer value in exact mode, positive value in multiplicative mode).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed instance file or generator spec.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Independent stream for trial `index` of a run seeded with `seed`.
inline Rng TrialRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x5f3759dfu};
  return Rng(seq);
}

}  // namespace sfm

#endif  // SFM_TYPES_H_
