// Copyright 2026 The Blender Authors
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

#ifndef BLENDER_SAMPLING_HPP_
#define BLENDER_SAMPLING_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

// Randomness for the simulator. None of this is cryptographically secure;
// a deployment would replace RngStream with a CSPRNG and use a noise
// sampler hardened against floating-point attacks.

namespace blender {

/// Deterministic generator identified by (master seed, stream id).
///
/// Models UniformRandomBitGenerator so it can drive <random> distributions
/// and std::shuffle. Streams are single-owner.
class RngStream {
 public:
  using result_type = std::mt19937_64::result_type;

  RngStream(uint64_t master_seed, uint64_t stream_id) : stream_id_(stream_id) {
    std::seed_seq seq{
        static_cast<uint32_t>(master_seed),
        static_cast<uint32_t>(master_seed >> 32),
        static_cast<uint32_t>(stream_id),
        static_cast<uint32_t>(stream_id >> 32),
        0x5eedb1e7u,
    };
    engine_.seed(seq);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  uint64_t stream_id() const { return stream_id_; }

  // Uniform double in [0, 1) with 53 random bits.
  double UniformUnit() { return (engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
  uint64_t stream_id_;
};

inline RngStream Substream(uint64_t master_seed, uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

/// 64-bit FNV-1a. Stable across platforms and builds, unlike std::hash.
inline uint64_t StableHash(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// SplitMix64 finalizer, used to derive child seeds from a parent seed.
inline uint64_t MixSeed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace internal {

// Inverse CDF. u is uniform on (-1/2, 1/2); exactly one uniform per draw.
template <class URBG>
double LaplaceInverseCdf(double scale, URBG& rng) {
  double u;
  do {
    u = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
  } while (u == -0.5);
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0 ? -magnitude : magnitude;
}

}  // namespace internal

/// One draw from the zero-centred Laplace distribution with the given scale.
template <class URBG>
absl::StatusOr<double> SampleLaplace(double scale, URBG& rng) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError("Laplace scale must be positive");
  }
  return internal::LaplaceInverseCdf(scale, rng);
}

inline double LaplaceCdf(double x, double scale) {
  return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

/// Noise policy used by the curator-side mechanisms.
struct LaplaceNoise {
  double operator()(double scale, RngStream& rng) const {
    return internal::LaplaceInverseCdf(scale, rng);
  }
};

template <class URBG>
size_t UniformIndex(size_t n, URBG& rng) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

/// Returns each element with probability 1/n.
template <class T, class URBG>
absl::StatusOr<T> UniformChoice(std::span<const T> items, URBG& rng) {
  if (items.empty()) {
    return absl::InvalidArgumentError("cannot choose from an empty sequence");
  }
  return items[UniformIndex(items.size(), rng)];
}

}  // namespace blender

#endif  // BLENDER_SAMPLING_HPP_
