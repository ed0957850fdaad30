// Copyright 2026 The meshgnn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef MESHGNN_CORE_HPP
#define MESHGNN_CORE_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace meshgnn {

using Real = double;
using Vec3 = Eigen::Matrix<Real, 3, 1>;
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Runtime failure inside an algorithm (maps to CLI exit code 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input or configuration (maps to CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// All stochastic code draws from this engine so that a single seed
// reproduces a run.
using Rng = std::mt19937_64;

// Derives an independent stream seed from a root seed and a stage name
// (FNV-1a over the name, then a splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stage) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = root ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage,
                                 std::uint64_t index) {
  return derive_seed(root, std::string(stage) + "#" + std::to_string(index));
}

// Uniform integer in [lo, hi] that does not depend on the standard
// library's distribution implementation.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = Rng::max() - Rng::max() % span;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

// Uniform real in [0, 1) from the top 53 bits.
inline Real uniform01(Rng& rng) {
  return static_cast<Real>(rng() >> 11) * 0x1.0p-53;
}

inline Real uniform_real(Rng& rng, Real lo, Real hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Standard normal via Box-Muller (one value per call).
inline Real standard_normal(Rng& rng) {
  Real u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const Real u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace meshgnn

#endif  // MESHGNN_CORE_HPP
